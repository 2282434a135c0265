//! Dataset evaluation: replay every story, answer each question from the
//! sentences preceding it, and score against the recorded answers.

use narrate_core::babi::{parse_babi, Question, Story};
use narrate_core::pipeline::Pipeline;
use rayon::prelude::*;
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct TaskEval {
    pub task: u32,
    pub scored: usize,
    pub correct: usize,
    pub accuracy: f64,
    /// One line per miss: the question, what was expected, what happened.
    #[serde(skip)]
    pub failures: Vec<String>,
}

/// Compares answers leniently: case and surrounding space never matter, and
/// comma-separated lists are compared as sets.
pub fn normalize_answer(answer: &str) -> String {
    let mut parts: Vec<String> = answer
        .split(',')
        .map(|p| p.trim().to_lowercase())
        .filter(|p| !p.is_empty())
        .collect();
    parts.sort();
    parts.join(",")
}

/// Evaluates one task's dataset text.
pub fn evaluate_task(pipeline: &Pipeline, task: u32, text: &str) -> Result<TaskEval, String> {
    let stories = parse_babi(text).map_err(|d| format!("task {task}: {}", d.message))?;
    let units: Vec<(usize, &Story, usize, &Question)> = stories
        .iter()
        .enumerate()
        .flat_map(|(story_index, story)| {
            story
                .questions()
                .map(move |(item_index, question)| (story_index, story, item_index, question))
        })
        .collect();

    let results: Vec<Result<(), String>> = units
        .par_iter()
        .map(|&(story_index, story, item_index, question)| {
            let describe = |outcome: &str| {
                format!(
                    "story {} line {}: \"{}\" expected \"{}\", {outcome}",
                    story_index + 1,
                    question.number,
                    question.text,
                    question.answer,
                )
            };
            let sentences = story.sentences_before(item_index);
            let run = pipeline
                .run_story(&sentences)
                .map_err(|e| describe(&format!("failed: {}", e.message)))?;
            let got = pipeline
                .answer(&question.text, &run)
                .map_err(|e| describe(&format!("failed: {}", e.message)))?;
            if normalize_answer(&got) == normalize_answer(&question.answer) {
                Ok(())
            } else {
                Err(describe(&format!("got \"{got}\"")))
            }
        })
        .collect();

    let scored = results.len();
    let failures: Vec<String> = results.into_iter().filter_map(Result::err).collect();
    let correct = scored - failures.len();
    Ok(TaskEval {
        task,
        scored,
        correct,
        accuracy: if scored == 0 {
            0.0
        } else {
            100.0 * correct as f64 / scored as f64
        },
        failures,
    })
}

/// Renders task results as an aligned table.
pub fn render_table(evals: &[TaskEval]) -> String {
    let mut out = String::from("task  scored  correct  accuracy\n");
    for e in evals {
        out.push_str(&format!(
            "{:<4}  {:<6}  {:<7}  {:.1}\n",
            e.task, e.scored, e.correct, e.accuracy
        ));
    }
    out
}

/// Renders task results as one JSON object per line.
pub fn render_jsonl(evals: &[TaskEval]) -> String {
    let mut out = String::new();
    for e in evals {
        out.push_str(&serde_json::to_string(e).expect("plain struct serializes"));
        out.push('\n');
    }
    out
}
