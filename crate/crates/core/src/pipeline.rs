//! End-to-end orchestration: sentences to discourse representation to
//! program to model to answers, with every failure classified by what the
//! caller should do about it.

use crate::alm::{parse_program, validate, Program, SortTable};
use crate::babi::build_drs;
use crate::diag::Diagnostic;
use crate::drs::{parse_drs, validate_drs, Drs};
use crate::gen::generate_program;
use crate::library::{Library, Lexicon, RoleSortTable};
use crate::qa::answer_question;
use crate::semantics::{extract_model, ground, Model, ProjectionErrorKind};
use std::collections::BTreeMap;

/// What kind of failure occurred, which is also the process exit code the
/// command-line front end reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// Malformed input: unparsable files, invalid programs, bad histories.
    Input = 1,
    /// The narrative admits no consistent model.
    Inconsistent = 2,
    /// The input is well formed but uses a construct outside the system's
    /// coverage: an unknown verb, an unsupported question, a class the
    /// library lacks.
    Unsupported = 3,
}

impl ErrorClass {
    pub fn exit_code(self) -> i32 {
        self as i32
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Read,
    Translate,
    Validate,
    Ground,
    Project,
    Answer,
}

impl std::fmt::Display for Stage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            Stage::Read => "reading the input",
            Stage::Translate => "translating the discourse",
            Stage::Validate => "validating the program",
            Stage::Ground => "grounding the program",
            Stage::Project => "projecting the trajectory",
            Stage::Answer => "answering the question",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone)]
pub struct PipelineError {
    pub stage: Stage,
    pub class: ErrorClass,
    pub message: String,
}

impl std::fmt::Display for PipelineError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} failed: {}", self.stage, self.message)
    }
}

impl std::error::Error for PipelineError {}

/// Sorts a diagnostic into the class a front end should exit with.
/// Unknown-verb, unknown-class, and unsupported-question failures are
/// coverage gaps; everything else a diagnostic reports is a malformed input.
fn classify(stage: Stage, diag: Diagnostic) -> PipelineError {
    let m = &diag.message;
    let unsupported = m.contains("unknown verb")
        || m.contains("unsupported question")
        || m.contains("no module for class")
        || m.contains("no attribute for role");
    PipelineError {
        stage,
        class: if unsupported {
            ErrorClass::Unsupported
        } else {
            ErrorClass::Input
        },
        message: diag.message,
    }
}

/// A story processed to the point where questions can be answered.
#[derive(Debug, Clone)]
pub struct StoryRun {
    pub drs: Drs,
    pub program: Program,
    pub model: Model,
    /// Warnings gathered along the way (executability violations in
    /// permissive mode, validation advisories).
    pub diagnostics: Vec<Diagnostic>,
}

#[derive(Debug, Clone)]
pub struct Pipeline {
    pub library: Library,
    pub lexicon: Lexicon,
    pub roles: RoleSortTable,
    /// Fail on executability violations instead of warning.
    pub strict_exec: bool,
}

impl Default for Pipeline {
    fn default() -> Self {
        Pipeline {
            library: crate::library::builtin_library(),
            lexicon: Lexicon::builtin(),
            roles: RoleSortTable::standard(),
            strict_exec: false,
        }
    }
}

impl Pipeline {
    /// Sentences all the way to a queryable model.
    pub fn run_story(&self, sentences: &[&str]) -> Result<StoryRun, PipelineError> {
        let drs =
            build_drs(sentences, &self.lexicon).map_err(|d| classify(Stage::Read, d))?;
        self.run_drs(drs, "base")
    }

    /// A parsed discourse representation to a queryable model.
    pub fn run_drs(&self, drs: Drs, name: &str) -> Result<StoryRun, PipelineError> {
        let mut diagnostics = validate_drs(&drs);
        if diagnostics.iter().any(|d| d.is_error()) {
            let first = diagnostics.into_iter().find(|d| d.is_error()).unwrap();
            return Err(classify(Stage::Read, first));
        }
        let program = generate_program(&drs, name, &self.library, &self.roles)
            .map_err(|d| classify(Stage::Translate, d))?;
        let names = drs
            .entities
            .iter()
            .filter_map(|e| e.name.clone().map(|n| (e.id.clone(), n)))
            .collect();
        let (model, mut run_diags) = self.project_program(&program, &names)?;
        diagnostics.append(&mut run_diags);
        Ok(StoryRun {
            drs,
            program,
            model,
            diagnostics,
        })
    }

    /// Text in discourse fact form to a queryable model.
    pub fn run_drs_text(&self, source: &str, name: &str) -> Result<StoryRun, PipelineError> {
        let drs = parse_drs(source).map_err(|d| classify(Stage::Read, d))?;
        self.run_drs(drs, name)
    }

    /// A system description (with `names` mapping instances to surface
    /// forms) to its model.
    pub fn project_program(
        &self,
        program: &Program,
        names: &BTreeMap<String, String>,
    ) -> Result<(Model, Vec<Diagnostic>), PipelineError> {
        let flat = self
            .library
            .resolve_imports(program)
            .map_err(|d| classify(Stage::Validate, d))?;
        let mut diagnostics = validate(&flat, &SortTable::minimal());
        if let Some(first) = diagnostics.iter().position(|d| d.is_error()) {
            return Err(classify(Stage::Validate, diagnostics.swap_remove(first)));
        }
        let gp = ground(&flat).map_err(|d| classify(Stage::Ground, d))?;
        let trajectory = gp.project(self.strict_exec).map_err(|e| PipelineError {
            stage: Stage::Project,
            class: match e.kind {
                ProjectionErrorKind::Input => ErrorClass::Input,
                ProjectionErrorKind::Inconsistent => ErrorClass::Inconsistent,
            },
            message: e.message,
        })?;
        diagnostics.extend(trajectory.diagnostics.iter().cloned());
        let model = extract_model(&gp, &trajectory, names)
            .map_err(|d| classify(Stage::Project, d))?;
        Ok((model, diagnostics))
    }

    /// Source text of a system description to its model. Instances name
    /// themselves, so the model speaks in the program's own constants.
    pub fn run_program_text(&self, source: &str) -> Result<(Model, Vec<Diagnostic>), PipelineError> {
        let program = parse_program(source).map_err(|d| classify(Stage::Read, d))?;
        let flat = self
            .library
            .resolve_imports(&program)
            .map_err(|d| classify(Stage::Validate, d))?;
        let names = flat
            .structure
            .instances
            .iter()
            .flat_map(|decl| decl.names.iter())
            .map(|n| (n.clone(), n.clone()))
            .collect();
        self.project_program(&program, &names)
    }

    pub fn answer(&self, question: &str, run: &StoryRun) -> Result<String, PipelineError> {
        answer_question(question, &run.model, &run.drs, &self.library)
            .map_err(|d| classify(Stage::Answer, d))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn a_story_runs_to_answers() {
        let pipeline = Pipeline::default();
        let run = pipeline
            .run_story(&[
                "Mary moved to the bathroom.",
                "John went to the hallway.",
            ])
            .unwrap();
        assert_eq!(pipeline.answer("Where is Mary?", &run).unwrap(), "bathroom");
        assert!(run.diagnostics.is_empty());
        assert_eq!(run.program.history.len(), 2);
    }

    #[test]
    fn unknown_verbs_classify_as_unsupported() {
        let err = Pipeline::default()
            .run_story(&["Mary vanished into the mist."])
            .unwrap_err();
        assert_eq!(err.class, ErrorClass::Unsupported);
        assert_eq!(err.stage, Stage::Read);
        assert_eq!(err.class.exit_code(), 3);
    }

    #[test]
    fn unsupported_questions_classify_as_unsupported() {
        let pipeline = Pipeline::default();
        let run = pipeline.run_story(&["Mary moved to the bathroom."]).unwrap();
        let err = pipeline.answer("Why is Mary sad?", &run).unwrap_err();
        assert_eq!(err.class, ErrorClass::Unsupported);
        assert_eq!(err.stage, Stage::Answer);
    }

    #[test]
    fn strict_mode_turns_repeat_moves_into_inconsistency() {
        let sentences = [
            "Mary went to the kitchen.",
            "Mary went to the kitchen.",
        ];
        let permissive = Pipeline::default();
        let run = permissive.run_story(&sentences).unwrap();
        assert_eq!(run.diagnostics.len(), 1);
        assert!(run.diagnostics[0].message.contains("impossible"));

        let strict = Pipeline {
            strict_exec: true,
            ..Pipeline::default()
        };
        let err = strict.run_story(&sentences).unwrap_err();
        assert_eq!(err.class, ErrorClass::Inconsistent);
        assert_eq!(err.class.exit_code(), 2);
    }

    #[test]
    fn malformed_drs_text_is_an_input_error() {
        let err = Pipeline::default()
            .run_drs_text("entity(r1", "base")
            .unwrap_err();
        assert_eq!(err.class, ErrorClass::Input);
        assert_eq!(err.class.exit_code(), 1);
    }

    #[test]
    fn programs_run_with_their_own_names() {
        let source = "
system description primate
  theory primate_theory
    import t_run_51_3_2.m_run_51_3_2_1 from VN_class_library
    module primate
      depends on t_run_51_3_2.m_run_51_3_2_1
      sorts declarations
        monkey :: living_entity
        tree :: spatial_entity
  structure primate_structure
    instances
      m in monkey
      t in tree
      climb in run_51_3_2_1
        vn_theme(m) = true
        vn_destination(t) = true
  temporal projection
  max steps 2
  history
    happened(climb, 0).
";
        let (model, diags) = Pipeline::default().run_program_text(source).unwrap();
        assert!(diags.is_empty());
        assert_eq!(model.atoms.len(), 1);
        assert_eq!(model.atoms[0].args, vec!["m".to_string(), "t".to_string()]);
    }
}
