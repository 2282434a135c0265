//! The built-in commonsense knowledge base: a base sort hierarchy, the
//! loc_in/holding fluents, four core action classes (move, acquire,
//! relinquish, transfer), and VerbNet wrapper modules that tie thematic-role
//! attributes to the core action attributes via state constraints.
//!
//! Knowledge ships as ordinary `.alm` theory files (embedded copies of the
//! `core/` and `vn_class_library/` trees) plus a tab-separated verb lexicon.
//! A user-supplied directory can extend or override both.

mod lexicon;
mod roles;

pub use lexicon::{parse_lexicon, LexEntry, Lexicon, Slot};
pub use roles::{normalize_role, RoleSortTable};

use crate::alm::{
    parse_theory, Axiom, Condition, Ident, ModuleDecl, ModulePath, Program, SortTable, Theory,
};
use crate::diag::Diagnostic;
use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

/// VerbNet class ids become sort identifiers with `.` and `-` replaced by
/// `_`: run-51.3.2-1 names the sort run_51_3_2_1.
pub fn normalize_class_id(id: &str) -> String {
    id.chars()
        .map(|c| if c == '.' || c == '-' { '_' } else { c })
        .collect()
}

/// A transfer-style action class as seen by question answering: the wrapper
/// sort plus the thematic-role names (vn_ prefix stripped) that fill the
/// giver, object, and recipient positions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransferClass {
    pub sort: Ident,
    pub giver_role: String,
    pub theme_role: String,
    pub recipient_role: String,
}

#[derive(Debug, Clone)]
pub struct Library {
    /// Theory name to (sub-library tag, theory).
    theories: BTreeMap<Ident, (String, Theory)>,
    /// Normalized class id (= wrapper sort name) to declaring module.
    class_index: BTreeMap<String, ModulePath>,
    transfer_classes: Vec<TransferClass>,
    /// Sort hierarchy across every module in the library.
    sorts: SortTable,
}

/// Everything needed to import and use one action class.
#[derive(Debug, Clone, Copy)]
pub struct ClassModule<'a> {
    pub path: &'a ModulePath,
    /// Sub-library tag, e.g. "VN_class_library"; import lines name it.
    pub library: &'a str,
    /// The class sort declared by the module.
    pub sort: &'a str,
    pub module: &'a ModuleDecl,
}

pub fn builtin_library() -> Library {
    let files: [(&str, &str); 7] = [
        ("core", include_str!("builtin/core/base.alm")),
        ("core", include_str!("builtin/core/motion.alm")),
        ("core", include_str!("builtin/core/possession.alm")),
        (
            "VN_class_library",
            include_str!("builtin/vn_class_library/run_51_3_2.alm"),
        ),
        (
            "VN_class_library",
            include_str!("builtin/vn_class_library/get_13_5.alm"),
        ),
        (
            "VN_class_library",
            include_str!("builtin/vn_class_library/throw_17.alm"),
        ),
        (
            "VN_class_library",
            include_str!("builtin/vn_class_library/give_13.alm"),
        ),
    ];
    let theories = files
        .into_iter()
        .map(|(tag, text)| {
            let theory = parse_theory(text).expect("built-in library file parses");
            (tag.to_string(), theory)
        })
        .collect();
    Library::from_theories(theories).expect("built-in library is well formed")
}

impl Lexicon {
    pub fn builtin() -> Lexicon {
        parse_lexicon(include_str!("builtin/lexicon.tsv")).expect("built-in lexicon parses")
    }
}

impl Library {
    pub fn from_theories(theories: Vec<(String, Theory)>) -> Result<Library, Vec<Diagnostic>> {
        let mut diags = Vec::new();
        let mut by_name: BTreeMap<Ident, (String, Theory)> = BTreeMap::new();
        for (tag, theory) in theories {
            if !theory.imports.is_empty() {
                diags.push(Diagnostic::error(format!(
                    "library theory `{}` may not import; use depends on instead",
                    theory.name
                )));
            }
            if by_name.insert(theory.name.clone(), (tag, theory.clone())).is_some() {
                diags.push(Diagnostic::error(format!(
                    "theory `{}` provided more than once",
                    theory.name
                )));
            }
        }

        let mut sorts = SortTable::minimal();
        let mut class_index = BTreeMap::new();
        let mut module_paths = BTreeSet::new();
        for (_, theory) in by_name.values() {
            let mut module_names = BTreeSet::new();
            for m in &theory.modules {
                if !module_names.insert(m.name.clone()) {
                    diags.push(Diagnostic::error(format!(
                        "module `{}` declared more than once in theory `{}`",
                        m.name, theory.name
                    )));
                }
                let path = ModulePath::new(&theory.name, &m.name);
                module_paths.insert(path.clone());
                for decl in &m.sort_decls {
                    for name in &decl.names {
                        if !sorts.insert(name, decl.parents.clone()) {
                            diags.push(Diagnostic::error(format!(
                                "sort `{name}` declared more than once across the library"
                            )));
                        }
                        class_index.insert(name.clone(), path.clone());
                    }
                }
            }
        }
        for member in sorts.cycle_members() {
            diags.push(Diagnostic::error(format!(
                "sort `{member}` is its own ancestor"
            )));
        }

        // Only action sorts are addressable as classes.
        class_index.retain(|sort, _| sorts.descends_from(sort, crate::alm::sorts::ACTIONS));

        let lib = Library {
            theories: by_name,
            class_index,
            transfer_classes: Vec::new(),
            sorts,
        };
        lib.check_dependencies(&module_paths, &mut diags);
        lib.check_vn_mappings(&mut diags);
        if !diags.is_empty() {
            return Err(diags);
        }
        let transfer_classes = lib.find_transfer_classes();
        Ok(Library {
            transfer_classes,
            ..lib
        })
    }

    fn check_dependencies(&self, paths: &BTreeSet<ModulePath>, diags: &mut Vec<Diagnostic>) {
        // Missing targets, then cycles by depth-first walk.
        for (_, theory) in self.theories.values() {
            for m in &theory.modules {
                for dep in &m.depends_on {
                    if !paths.contains(dep) {
                        diags.push(Diagnostic::error(format!(
                            "module `{}.{}` depends on unknown module path {dep}",
                            theory.name, m.name
                        )));
                    }
                }
            }
        }
        let mut done = BTreeSet::new();
        for path in paths {
            let mut stack = Vec::new();
            if let Err(cycle) = self.walk(path, &mut done, &mut stack) {
                diags.push(Diagnostic::error(format!(
                    "dependency cycle involving {cycle}"
                )));
                return;
            }
        }
    }

    fn walk(
        &self,
        path: &ModulePath,
        done: &mut BTreeSet<ModulePath>,
        stack: &mut Vec<ModulePath>,
    ) -> Result<(), ModulePath> {
        if done.contains(path) {
            return Ok(());
        }
        if stack.contains(path) {
            return Err(path.clone());
        }
        let Some(module) = self.module(path) else {
            return Ok(()); // reported as a missing target already
        };
        stack.push(path.clone());
        for dep in &module.depends_on {
            self.walk(dep, done, stack)?;
        }
        stack.pop();
        done.insert(path.clone());
        Ok(())
    }

    /// Every vn_* attribute must be tied to exactly one core attribute by a
    /// state constraint in its own module.
    fn check_vn_mappings(&self, diags: &mut Vec<Diagnostic>) {
        for (_, theory) in self.theories.values() {
            for m in &theory.modules {
                let vn_attrs = m
                    .sort_decls
                    .iter()
                    .flat_map(|d| &d.attributes)
                    .filter(|a| a.name.starts_with("vn_"));
                for attr in vn_attrs {
                    let mappings = m
                        .axioms
                        .iter()
                        .filter_map(|ax| match ax {
                            Axiom::StateConstraint(sc) if sc.head.function != attr.name => {
                                Some(sc)
                            }
                            _ => None,
                        })
                        .filter(|sc| {
                            sc.body.iter().any(|c| {
                                matches!(c, Condition::Literal(l) if l.function == attr.name)
                            })
                        })
                        .count();
                    if mappings != 1 {
                        diags.push(Diagnostic::error(format!(
                            "attribute `{}` in module `{}` is mapped by {mappings} state \
                             constraints (expected exactly one)",
                            attr.name, m.name
                        )));
                    }
                }
            }
        }
    }

    /// Wrapper sorts that descend from the core `transfer` action, with the
    /// thematic roles mapped onto its agent/theme/recipient attributes.
    fn find_transfer_classes(&self) -> Vec<TransferClass> {
        let mut out = Vec::new();
        for (_, theory) in self.theories.values() {
            for m in &theory.modules {
                for decl in &m.sort_decls {
                    for sort in &decl.names {
                        if sort == "transfer" || !self.sorts.descends_from(sort, "transfer") {
                            continue;
                        }
                        let role_for = |core_attr: &str| -> Option<String> {
                            m.axioms.iter().find_map(|ax| {
                                let Axiom::StateConstraint(sc) = ax else {
                                    return None;
                                };
                                if sc.head.function != core_attr {
                                    return None;
                                }
                                sc.body.iter().find_map(|c| match c {
                                    Condition::Literal(l) if l.function.starts_with("vn_") => {
                                        Some(l.function["vn_".len()..].to_string())
                                    }
                                    _ => None,
                                })
                            })
                        };
                        let (Some(giver), Some(theme), Some(recipient)) = (
                            role_for("agent"),
                            role_for("theme"),
                            role_for("recipient"),
                        ) else {
                            continue;
                        };
                        out.push(TransferClass {
                            sort: sort.clone(),
                            giver_role: giver,
                            theme_role: theme,
                            recipient_role: recipient,
                        });
                    }
                }
            }
        }
        out
    }

    pub fn module(&self, path: &ModulePath) -> Option<&ModuleDecl> {
        let (_, theory) = self.theories.get(&path.theory)?;
        theory.modules.iter().find(|m| m.name == path.module)
    }

    pub fn class_index(&self) -> &BTreeMap<String, ModulePath> {
        &self.class_index
    }

    /// Looks up an action class by VerbNet class id (in either spelling).
    pub fn class_module(&self, class_id: &str) -> Option<ClassModule<'_>> {
        let sort = normalize_class_id(class_id);
        let (sort, path) = self.class_index.get_key_value(&sort)?;
        let (tag, _) = self.theories.get(&path.theory)?;
        Some(ClassModule {
            path,
            library: tag,
            sort,
            module: self.module(path)?,
        })
    }

    pub fn transfer_classes(&self) -> &[TransferClass] {
        &self.transfer_classes
    }

    pub fn sorts(&self) -> &SortTable {
        &self.sorts
    }

    /// Replaces the program's imports with the imported modules and their
    /// transitive dependencies, inlined exactly once in dependency order.
    /// A program without imports is returned unchanged.
    pub fn resolve_imports(&self, p: &Program) -> Result<Program, Diagnostic> {
        if p.theory.imports.is_empty() {
            return Ok(p.clone());
        }
        let mut done = BTreeSet::new();
        let mut inlined = Vec::new();
        for import in &p.theory.imports {
            let Some((tag, _)) = self.theories.get(&import.path.theory) else {
                return Err(Diagnostic::error(format!(
                    "unknown module path {} in import",
                    import.path
                )));
            };
            if !tag.eq_ignore_ascii_case(&import.library) {
                return Err(Diagnostic::error(format!(
                    "module {} is not provided by library {} (found in {tag})",
                    import.path, import.library
                )));
            }
            self.inline(&import.path, &mut done, &mut Vec::new(), &mut inlined)?;
        }
        let mut flat = p.clone();
        flat.theory.imports.clear();
        inlined.extend(flat.theory.modules);
        flat.theory.modules = inlined;
        Ok(flat)
    }

    fn inline(
        &self,
        path: &ModulePath,
        done: &mut BTreeSet<ModulePath>,
        stack: &mut Vec<ModulePath>,
        out: &mut Vec<ModuleDecl>,
    ) -> Result<(), Diagnostic> {
        if done.contains(path) {
            return Ok(());
        }
        if stack.contains(path) {
            return Err(Diagnostic::error(format!(
                "dependency cycle involving {path}"
            )));
        }
        let Some(module) = self.module(path) else {
            return Err(Diagnostic::error(format!("unknown module path {path}")));
        };
        stack.push(path.clone());
        for dep in &module.depends_on {
            self.inline(dep, done, stack, out)?;
        }
        stack.pop();
        done.insert(path.clone());
        out.push(module.clone());
        Ok(())
    }

    /// Parses every `.alm` file under `dir` (a subdirectory name becomes the
    /// sub-library tag; top-level files get the tag "user") and adds the
    /// theories, replacing any existing theory with the same name.
    pub fn extend_from_dir(&mut self, dir: &Path) -> Result<(), Vec<Diagnostic>> {
        let mut files = Vec::new();
        collect_alm_files(dir, &mut files).map_err(|e| {
            vec![Diagnostic::error(format!(
                "cannot read library directory {}: {e}",
                dir.display()
            ))]
        })?;
        files.sort();

        let mut theories: Vec<(String, Theory)> = self
            .theories
            .values()
            .map(|(tag, th)| (tag.clone(), th.clone()))
            .collect();
        for file in files {
            let text = fs::read_to_string(&file).map_err(|e| {
                vec![Diagnostic::error(format!("cannot read {}: {e}", file.display()))]
            })?;
            let theory = parse_theory(&text).map_err(|mut d| {
                d.message = format!("in {}: {}", file.display(), d.message);
                vec![d]
            })?;
            let tag = match file.parent() {
                Some(parent) if parent != dir => parent
                    .file_name()
                    .map(|n| n.to_string_lossy().into_owned())
                    .unwrap_or_else(|| "user".to_string()),
                _ => "user".to_string(),
            };
            match theories.iter_mut().find(|(_, t)| t.name == theory.name) {
                Some(slot) => *slot = (tag, theory),
                None => theories.push((tag, theory)),
            }
        }
        *self = Library::from_theories(theories)?;
        Ok(())
    }
}

fn collect_alm_files(dir: &Path, out: &mut Vec<PathBuf>) -> std::io::Result<()> {
    for entry in fs::read_dir(dir)? {
        let path = entry?.path();
        if path.is_dir() {
            collect_alm_files(&path, out)?;
        } else if path.extension().is_some_and(|ext| ext == "alm") {
            out.push(path);
        }
    }
    Ok(())
}

/// Checks a lexicon against a library: every class must resolve to a module
/// and every frame role must be a declared vn_ attribute of that module.
pub fn validate_lexicon(lexicon: &Lexicon, library: &Library) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    for entry in lexicon.entries() {
        let Some(class) = library.class_module(&entry.class_id) else {
            diags.push(Diagnostic::error(format!(
                "lexicon entry `{}` names class {} with no library module",
                entry.lemma, entry.class_id
            )));
            continue;
        };
        for (_, role) in &entry.frame {
            let attr = format!("vn_{}", normalize_role(role));
            let declared = class
                .module
                .sort_decls
                .iter()
                .flat_map(|d| &d.attributes)
                .any(|a| a.name == attr);
            if !declared {
                diags.push(Diagnostic::error(format!(
                    "lexicon entry `{}` uses role {role}, but module {} declares no `{attr}`",
                    entry.lemma, class.path
                )));
            }
        }
    }
    diags
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alm::{parse_program, validate};

    #[test]
    fn builtin_library_indexes_the_four_classes() {
        let lib = builtin_library();
        let class = lib.class_module("run-51.3.2-1").unwrap();
        assert_eq!(class.path, &ModulePath::new("t_run_51_3_2", "m_run_51_3_2_1"));
        assert_eq!(class.library, "VN_class_library");
        assert_eq!(class.sort, "run_51_3_2_1");
        for id in ["get-13.5.1", "throw-17.1", "give-13.1", "run_51_3_2_1"] {
            assert!(lib.class_module(id).is_some(), "missing class {id}");
        }
        assert!(lib.class_module("snore-40.2.4").is_none());
        // Core action sorts are addressable too; base sorts are not.
        assert!(lib.class_index().contains_key("move"));
        assert!(!lib.class_index().contains_key("living_entity"));
    }

    #[test]
    fn builtin_transfer_classes_cover_giving() {
        let lib = builtin_library();
        assert_eq!(
            lib.transfer_classes(),
            &[TransferClass {
                sort: "give_13_1".to_string(),
                giver_role: "agent".to_string(),
                theme_role: "theme".to_string(),
                recipient_role: "recipient".to_string(),
            }]
        );
    }

    #[test]
    fn builtin_lexicon_is_consistent_with_the_library() {
        let lex = Lexicon::builtin();
        assert!(lex.get("travelled").is_some() && lex.get("traveled").is_some());
        assert_eq!(validate_lexicon(&lex, &builtin_library()), Vec::new());
    }

    const IMPORTING: &str = "
system description d
  theory d_theory
    import t_run_51_3_2.m_run_51_3_2_1 from VN_class_library
    module d_module
      depends on t_run_51_3_2.m_run_51_3_2_1
      sort declarations
        john :: living_entity
  structure d_structure
    instances
      r1 in john
";

    #[test]
    fn resolve_imports_inlines_dependencies_in_order() {
        let lib = builtin_library();
        let p = parse_program(IMPORTING).unwrap();
        let flat = lib.resolve_imports(&p).unwrap();
        assert!(flat.theory.imports.is_empty());
        let names: Vec<&str> = flat.theory.modules.iter().map(|m| m.name.as_str()).collect();
        assert_eq!(
            names,
            vec!["m_base", "m_fluents", "m_move", "m_run_51_3_2_1", "d_module"]
        );
        assert!(flat
            .modules()
            .flat_map(|m| &m.fluent_decls)
            .any(|f| f.name == "loc_in"));

        // The flattened program stands on its own.
        let diags = validate(&flat, &SortTable::minimal());
        assert_eq!(diags, Vec::new());

        // Flattening again changes nothing.
        assert_eq!(lib.resolve_imports(&flat).unwrap(), flat);
    }

    #[test]
    fn resolve_imports_inlines_shared_dependencies_once() {
        let lib = builtin_library();
        let src = IMPORTING.replace(
            "import t_run_51_3_2.m_run_51_3_2_1 from VN_class_library",
            "import t_run_51_3_2.m_run_51_3_2_1 from VN_class_library\n    \
             import t_get_13_5.m_get_13_5_1 from vn_class_library",
        );
        let flat = lib.resolve_imports(&parse_program(&src).unwrap()).unwrap();
        let fluent_modules = flat
            .theory
            .modules
            .iter()
            .filter(|m| m.name == "m_fluents")
            .count();
        assert_eq!(fluent_modules, 1);
    }

    #[test]
    fn resolve_imports_reports_unknown_paths_and_wrong_libraries() {
        let lib = builtin_library();
        let unknown = IMPORTING.replace("t_run_51_3_2.m_run_51_3_2_1", "t_x.m_y");
        let err = lib.resolve_imports(&parse_program(&unknown).unwrap()).unwrap_err();
        assert!(err.message.contains("t_x.m_y"));

        let wrong = IMPORTING.replace("from VN_class_library", "from core");
        let err = lib.resolve_imports(&parse_program(&wrong).unwrap()).unwrap_err();
        assert!(err.message.contains("not provided by library core"));
    }

    #[test]
    fn construction_rejects_dependency_cycles() {
        let a = parse_theory("theory t_a\n  module m_a\n    depends on t_b.m_b\n").unwrap();
        let b = parse_theory("theory t_b\n  module m_b\n    depends on t_a.m_a\n").unwrap();
        let err = Library::from_theories(vec![
            ("x".to_string(), a),
            ("x".to_string(), b),
        ])
        .unwrap_err();
        assert!(err.iter().any(|d| d.message.contains("cycle")));
    }

    #[test]
    fn construction_rejects_unmapped_vn_attributes() {
        let theory = "
theory t_w
  module m_w
    sort declarations
      w :: actions
        attributes
          vn_theme : universe -> booleans
";
        let err = Library::from_theories(vec![
            ("x".to_string(), parse_theory(theory).unwrap()),
        ])
        .unwrap_err();
        assert!(err.iter().any(|d| d.message.contains("vn_theme")));
    }

    #[test]
    fn extend_from_dir_overrides_by_theory_name() {
        let dir = std::env::temp_dir().join(format!("narrate-lib-{}", std::process::id()));
        let sub = dir.join("vn_class_library");
        fs::create_dir_all(&sub).unwrap();
        // Replace the throw wrapper: same theory name, extra attribute spelling.
        fs::write(
            sub.join("throw_17.alm"),
            "theory t_throw_17\n  module m_throw_17_1\n    depends on t_possession.m_relinquish\n\
             \x20   sort declarations\n      throw_17_1 :: relinquish\n        attributes\n\
             \x20         vn_agent : living_entity -> booleans\n\
             \x20         vn_patient : entity -> booleans\n    axioms\n      state constraints\n\
             \x20       actor(X, A) if instance(X, throw_17_1), vn_agent(X, A).\n\
             \x20       theme(X, T) if instance(X, throw_17_1), vn_patient(X, T).\n",
        )
        .unwrap();

        let mut lib = builtin_library();
        let theory_count_before = lib.theories.len();
        lib.extend_from_dir(&dir).unwrap();
        assert_eq!(lib.theories.len(), theory_count_before);
        let class = lib.class_module("throw-17.1").unwrap();
        let attrs: Vec<&str> = class
            .module
            .sort_decls
            .iter()
            .flat_map(|d| &d.attributes)
            .map(|a| a.name.as_str())
            .collect();
        assert!(attrs.contains(&"vn_patient"));
        fs::remove_dir_all(&dir).unwrap();
    }
}
