//! Shared plumbing for the `narrate` binary: dataset simulation, evaluation,
//! and pipeline construction from command-line options.

pub mod eval;
pub mod sim;

use std::path::Path;

use narrate_core::library::{
    builtin_library, parse_lexicon, validate_lexicon, Lexicon, RoleSortTable,
};
use narrate_core::pipeline::Pipeline;

/// Builds a pipeline from the common CLI options. `lib_dir` extends or
/// overrides the built-in knowledge library (and, when it contains a
/// `lexicon.tsv`, the verb lexicon); `lexicon_file` merges per-lemma
/// overrides on top of that.
pub fn load_pipeline(
    lib_dir: Option<&Path>,
    lexicon_file: Option<&Path>,
    strict_exec: bool,
) -> Result<Pipeline, String> {
    let mut library = builtin_library();
    let mut lexicon = Lexicon::builtin();
    if let Some(dir) = lib_dir {
        library.extend_from_dir(dir).map_err(|diags| {
            let first = diags.into_iter().next().expect("at least one problem");
            format!("{}: {}", dir.display(), first.message)
        })?;
        let lexicon_path = dir.join("lexicon.tsv");
        if lexicon_path.is_file() {
            let text = std::fs::read_to_string(&lexicon_path)
                .map_err(|e| format!("{}: {e}", lexicon_path.display()))?;
            let extra = parse_lexicon(&text)
                .map_err(|d| format!("{}: {}", lexicon_path.display(), d.message))?;
            lexicon.merge(extra);
        }
    }
    if let Some(path) = lexicon_file {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        let extra =
            parse_lexicon(&text).map_err(|d| format!("{}: {}", path.display(), d.message))?;
        lexicon.merge(extra);
    }
    if let Some(problem) = validate_lexicon(&lexicon, &library).into_iter().next() {
        return Err(problem.message);
    }
    Ok(Pipeline {
        library,
        lexicon,
        roles: RoleSortTable::standard(),
        strict_exec,
    })
}

/// Output path for the `index`-th story of `total` when emitting
/// intermediates: a single story keeps the requested path untouched,
/// multiple stories get a numbered suffix before the extension.
pub fn emit_path(base: &Path, index: usize, total: usize) -> std::path::PathBuf {
    if total <= 1 {
        return base.to_path_buf();
    }
    let stem = base
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let suffixed = match base.extension() {
        Some(ext) => format!("{stem}.{}.{}", index + 1, ext.to_string_lossy()),
        None => format!("{stem}.{}", index + 1),
    };
    base.with_file_name(suffixed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::path::PathBuf;

    #[test]
    fn single_story_emits_keep_the_exact_path() {
        let base = PathBuf::from("/tmp/out.drs");
        assert_eq!(emit_path(&base, 0, 1), base);
    }

    #[test]
    fn multiple_stories_get_numbered_suffixes() {
        let base = PathBuf::from("/tmp/out.drs");
        assert_eq!(emit_path(&base, 0, 3), PathBuf::from("/tmp/out.1.drs"));
        assert_eq!(emit_path(&base, 2, 3), PathBuf::from("/tmp/out.3.drs"));
        let bare = PathBuf::from("/tmp/model");
        assert_eq!(emit_path(&bare, 1, 2), PathBuf::from("/tmp/model.2"));
    }

    #[test]
    fn the_default_pipeline_loads_without_options() {
        load_pipeline(None, None, false).unwrap();
    }
}
