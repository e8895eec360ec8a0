//! Bindings and command dispatch.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use frobperf_core::components::{pi0_ring, split_components, ComponentDecomposition, SplitConfig};
use frobperf_core::corering::{parse_poly, Poly, PrimeField};
use frobperf_core::fpalg::{
    frobenius_twist, morphism_kernel, relative_frobenius, schematic_image, sup_factorization, Base, Morphism,
    Presentation, PresentationOptions,
};
use frobperf_core::groebner::Budgets;
use frobperf_core::groupoid::{
    factorizations, groupoid_closure, morphism_violations, verify_universal_property, ClosureConfig, ClosureStatus,
    Factorization, Groupoid, GroupoidMap, Pregroupoid, UniversalVerdict,
};
use frobperf_core::perfection::{
    certificate_witness, is_relatively_perfect, preperfect, pi0_crosscheck, unramified_check, verify_coherent_certificate,
    ArrowVerdict, Candidate, ChainStatus, CoherentCertificate, Evidence, NotPerfect, PreperfectConfig, PreperfectionReport,
    RelativePerfectness, Unramified, UpperBound,
};
use frobperf_core::subalg::{frob_image_lazy, frob_image_subalgebra, SubalgebraHandle};
use serde_json::{json, Map, Value};

use crate::dsl::{parse_statements, Arg, BaseRef, Command, Decl, Pos, Spanned, Statement, SyntaxError};
use crate::json;

/// Global settings shared by every command of a run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Config {
    pub budgets: Budgets,
    pub max_steps: u32,
    pub seed: u64,
    /// Accepted for interface stability; commands run sequentially.
    pub threads: usize,
    pub closure: ClosureConfig,
    /// Node limit for the universal-property search.
    pub search_nodes: u64,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            budgets: Budgets::default(),
            max_steps: 4,
            seed: 0,
            threads: 1,
            closure: ClosureConfig::default(),
            search_nodes: 1 << 22,
        }
    }
}

impl Config {
    fn opts(&self) -> PresentationOptions {
        PresentationOptions { allow_zero: false, budgets: self.budgets }
    }

    fn json(&self) -> Value {
        json!({
            "max_pairs": self.budgets.max_pairs,
            "max_degree": self.budgets.max_degree,
            "max_steps": self.max_steps,
            "seed": self.seed,
            "threads": self.threads,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ScriptError {
    Syntax(SyntaxError),
    Semantic { pos: Pos, message: String },
}

impl ScriptError {
    pub fn pos(&self) -> Pos {
        match self {
            ScriptError::Syntax(e) => e.pos,
            ScriptError::Semantic { pos, .. } => *pos,
        }
    }

    pub fn json(&self) -> Value {
        let pos = self.pos();
        match self {
            ScriptError::Syntax(e) => json!({
                "status": "error",
                "kind": "syntax",
                "line": pos.line,
                "column": pos.col,
                "found": e.found,
                "expected": e.expected,
            }),
            ScriptError::Semantic { message, .. } => json!({
                "status": "error",
                "kind": "semantic",
                "line": pos.line,
                "column": pos.col,
                "message": message,
            }),
        }
    }
}

impl fmt::Display for ScriptError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScriptError::Syntax(e) => write!(f, "{}: syntax error: found {}, expected {}", e.pos, e.found, e.expected.join("|")),
            ScriptError::Semantic { pos, message } => write!(f, "{pos}: {message}"),
        }
    }
}

impl std::error::Error for ScriptError {}

fn semantic<T>(pos: Pos, message: impl Into<String>) -> Result<T, ScriptError> {
    Err(ScriptError::Semantic { pos, message: message.into() })
}

#[derive(Clone)]
pub enum Binding {
    Base(Arc<Presentation>),
    Algebra(Arc<Presentation>),
    Morphism(Morphism),
    Subalgebra(SubalgebraHandle),
    Pregroupoid(Pregroupoid),
}

impl Binding {
    fn kind(&self) -> &'static str {
        match self {
            Binding::Base(_) => "base",
            Binding::Algebra(_) => "algebra",
            Binding::Morphism(_) => "morphism",
            Binding::Subalgebra(_) => "subalgebra",
            Binding::Pregroupoid(_) => "pregroupoid",
        }
    }
}

/// A parsed script: bindings plus the commands to run, in order.
pub struct Session {
    pub bindings: BTreeMap<String, Binding>,
    pub commands: Vec<Command>,
    pub config: Config,
    base_dir: PathBuf,
}

/// Result of running every command.
pub struct RunOutput {
    pub document: Value,
    pub exit_code: i32,
}

fn parse_in(ring: &Arc<frobperf_core::corering::PolyRing>, text: &Spanned<String>) -> Result<Poly, ScriptError> {
    parse_poly(ring, &text.value).or_else(|e| match e {
        frobperf_core::Error::Parse { offset, message } => semantic(text.pos_at(offset), format!("bad polynomial: {message}")),
        other => semantic(text.pos, other.to_string()),
    })
}

fn core_err<T>(pos: Pos, r: frobperf_core::Result<T>) -> Result<T, ScriptError> {
    r.or_else(|e| semantic(pos, e.to_string()))
}

impl Session {
    pub fn parse(src: &str, base_dir: &Path, config: &Config) -> Result<Session, ScriptError> {
        let statements = parse_statements(src).map_err(ScriptError::Syntax)?;
        let mut s = Session { bindings: BTreeMap::new(), commands: Vec::new(), config: config.clone(), base_dir: base_dir.to_path_buf() };
        for st in statements {
            match st {
                Statement::Decl(d) => s.declare(d)?,
                Statement::Command(c) => s.commands.push(c),
            }
        }
        Ok(s)
    }

    fn bind(&mut self, name: &Spanned<String>, b: Binding) -> Result<(), ScriptError> {
        if self.bindings.contains_key(&name.value) {
            return semantic(name.pos, format!("`{}` is already defined", name.value));
        }
        self.bindings.insert(name.value.clone(), b);
        Ok(())
    }

    fn lookup(&self, name: &Spanned<String>) -> Result<&Binding, ScriptError> {
        self.bindings.get(&name.value).map_or_else(|| semantic(name.pos, format!("unknown name `{}`", name.value)), Ok)
    }

    fn algebra(&self, name: &Spanned<String>) -> Result<Arc<Presentation>, ScriptError> {
        match self.lookup(name)? {
            Binding::Base(a) | Binding::Algebra(a) => Ok(a.clone()),
            other => semantic(name.pos, format!("`{}` is a {}, not an algebra", name.value, other.kind())),
        }
    }

    fn morphism(&self, name: &Spanned<String>) -> Result<Morphism, ScriptError> {
        match self.lookup(name)? {
            Binding::Morphism(f) => Ok(f.clone()),
            other => semantic(name.pos, format!("`{}` is a {}, not a morphism", name.value, other.kind())),
        }
    }

    fn declare(&mut self, d: Decl) -> Result<(), ScriptError> {
        let opts = self.config.opts();
        match d {
            Decl::Base { name, p, vars, relations } => {
                let field = core_err(p.pos, PrimeField::new(p.value))?;
                let names: Vec<String> = vars.iter().map(|v| v.value.clone()).collect();
                let ring = core_err(name.pos, Presentation::ambient_ring(&Base::Field(field), &names))?;
                let rels = relations.iter().map(|r| parse_in(&ring, r)).collect::<Result<Vec<_>, _>>()?;
                let a = core_err(name.pos, Presentation::new(Base::Field(field), names, rels, &opts))?;
                self.bind(&name, Binding::Base(Arc::new(a)))
            }
            Decl::Algebra { name, over, gens, relations, allow_zero } => {
                let base = match over {
                    BaseRef::Field(p) => Base::Field(core_err(name.pos, PrimeField::new(p))?),
                    BaseRef::Named(b) => match self.lookup(&b)? {
                        Binding::Base(r) => Base::Algebra(r.clone()),
                        other => return semantic(b.pos, format!("`{}` is a {}, not a base", b.value, other.kind())),
                    },
                };
                let names: Vec<String> = gens.iter().map(|v| v.value.clone()).collect();
                let ring = core_err(name.pos, Presentation::ambient_ring(&base, &names))?;
                let rels = relations.iter().map(|r| parse_in(&ring, r)).collect::<Result<Vec<_>, _>>()?;
                let a = match Presentation::new(base, names, rels, &PresentationOptions { allow_zero, ..opts }) {
                    Ok(a) => a,
                    Err(frobperf_core::Error::ZeroAlgebra) => {
                        return semantic(name.pos, format!("`{}` is the zero algebra (add `allow_zero` to accept it)", name.value))
                    }
                    Err(e) => return semantic(name.pos, e.to_string()),
                };
                self.bind(&name, Binding::Algebra(Arc::new(a)))
            }
            Decl::Morphism { name, source, target, images } => {
                let (src, tgt) = (self.algebra(&source)?, self.algebra(&target)?);
                let mut by_gen: Vec<Option<Poly>> = vec![None; src.ngens()];
                for (g, img) in &images {
                    let Some(k) = src.gens().iter().position(|x| *x == g.value) else {
                        return semantic(g.pos, format!("`{}` is not a generator of `{}`", g.value, source.value));
                    };
                    if by_gen[k].is_some() {
                        return semantic(g.pos, format!("`{}` is mapped twice", g.value));
                    }
                    by_gen[k] = Some(parse_in(tgt.ring(), img)?);
                }
                let mut imgs = Vec::with_capacity(by_gen.len());
                for (k, img) in by_gen.into_iter().enumerate() {
                    match img {
                        Some(f) => imgs.push(f),
                        None => return semantic(name.pos, format!("no image given for `{}`", src.gens()[k])),
                    }
                }
                let f = core_err(name.pos, Morphism::new(src, tgt, imgs))?;
                self.bind(&name, Binding::Morphism(f))
            }
            Decl::Subalgebra { name, ambient, gens } => {
                let a = self.algebra(&ambient)?;
                let polys = gens.iter().map(|g| parse_in(a.ring(), g)).collect::<Result<Vec<_>, _>>()?;
                let h = core_err(name.pos, SubalgebraHandle::lazy(&a, polys))?;
                self.bind(&name, Binding::Subalgebra(h))
            }
            Decl::Pregroupoid { name, path } => {
                let p = self.load_pregroupoid(&path)?;
                self.bind(&name, Binding::Pregroupoid(p))
            }
        }
    }

    fn load_pregroupoid(&self, path: &Spanned<String>) -> Result<Pregroupoid, ScriptError> {
        let full = self.base_dir.join(&path.value);
        let text = std::fs::read_to_string(&full)
            .or_else(|e| semantic(path.pos, format!("cannot read `{}`: {e}", path.value)))?;
        json::read_pregroupoid(&text).or_else(|e| semantic(path.pos, format!("`{}`: {e}", path.value)))
    }

    fn pregroupoid_arg(&self, arg: &Arg) -> Result<Pregroupoid, ScriptError> {
        match arg {
            Arg::Text(path) => self.load_pregroupoid(path),
            Arg::Word(w) if self.bindings.contains_key(&w.value) => match self.lookup(w)? {
                Binding::Pregroupoid(p) => Ok(p.clone()),
                other => semantic(w.pos, format!("`{}` is a {}, not a pregroupoid", w.value, other.kind())),
            },
            Arg::Word(w) => self.load_pregroupoid(w),
            other => semantic(other.pos(), "expected a pregroupoid name or file"),
        }
    }

    /// Runs every command in order. Failing commands are reported and the
    /// run continues.
    pub fn run(&self) -> RunOutput {
        let mut results = Vec::new();
        let mut worst = 0;
        for cmd in &self.commands {
            let (code, mut report) = match self.execute(cmd) {
                Ok((code, v)) => (code, v),
                Err(e) => (1, e.json()),
            };
            worst = combine(worst, code);
            let obj = report.as_object_mut().expect("reports are objects");
            obj.insert("command".into(), Value::String(command_text(cmd)));
            obj.insert("line".into(), json!(cmd.name.pos.line));
            obj.insert("exit".into(), json!(code));
            results.push(report);
        }
        RunOutput {
            document: json!({ "config": self.config.json(), "results": results, "exit": worst }),
            exit_code: worst,
        }
    }

    fn execute(&self, cmd: &Command) -> Result<(i32, Value), ScriptError> {
        let args = &cmd.args;
        let pos = cmd.name.pos;
        let cfg = &self.config;
        let budgets = &cfg.budgets;
        let opts = cfg.opts();
        let name = |i: usize| -> Result<&Spanned<String>, ScriptError> {
            match args.get(i) {
                Some(Arg::Word(w)) => Ok(w),
                Some(other) => semantic(other.pos(), "expected a name"),
                None => semantic(pos, format!("`{}` needs more arguments", cmd.name.value)),
            }
        };
        let number = |i: usize| -> Result<u32, ScriptError> {
            match args.get(i) {
                Some(Arg::Number(n)) => u32::try_from(n.value).or_else(|_| semantic(n.pos, "number too large")),
                Some(other) => semantic(other.pos(), "expected a number"),
                None => semantic(pos, format!("`{}` needs more arguments", cmd.name.value)),
            }
        };
        let arity = |n: usize| -> Result<(), ScriptError> {
            match args.get(n) {
                Some(extra) => semantic(extra.pos(), "unexpected argument"),
                None => Ok(()),
            }
        };
        let core = |pos: Pos, e: frobperf_core::Error| -> Result<(i32, Value), ScriptError> {
            if let frobperf_core::Error::BudgetExceeded(b) = e {
                Ok((2, json!({ "status": "budget_exceeded", "budget": b.to_string() })))
            } else {
                semantic(pos, e.to_string())
            }
        };
        macro_rules! tryc {
            ($e:expr) => {
                match $e {
                    Ok(v) => v,
                    Err(e) => return core(pos, e),
                }
            };
        }
        match cmd.name.value.as_str() {
            "frobtwist" => {
                let a = self.algebra(name(0)?)?;
                let n = number(1)?;
                arity(2)?;
                let t = tryc!(frobenius_twist(&a, n, &PresentationOptions { allow_zero: true, ..opts }));
                Ok((0, json!({ "twist": json::presentation(&t) })))
            }
            "frobmap" => {
                let a = self.algebra(name(0)?)?;
                let n = number(1)?;
                arity(2)?;
                let f = tryc!(relative_frobenius(&a, n, &PresentationOptions { allow_zero: true, ..opts }));
                Ok((0, json!({ "frobenius": json::morphism(&f) })))
            }
            "kernel" => {
                let f = self.morphism(name(0)?)?;
                arity(1)?;
                let k = tryc!(morphism_kernel(&f, budgets));
                Ok((0, json!({ "kernel": json::polys(k.gens()), "injective": k.is_zero() })))
            }
            "image" => {
                let f = self.morphism(name(0)?)?;
                arity(1)?;
                let im = tryc!(schematic_image(&f, &opts));
                Ok((0, json!({
                    "image": json::presentation(&im.image),
                    "kernel": json::polys(im.kernel.gens()),
                    "inclusion": json::polys(im.inclusion.images()),
                })))
            }
            "sup" => {
                let a = self.algebra(name(0)?)?;
                let (n1, n2) = (name(1)?, name(2)?);
                arity(3)?;
                let (f, g) = (self.morphism(n1)?, self.morphism(n2)?);
                for (n, m) in [(n1, &f), (n2, &g)] {
                    if !m.target().same_as(&a) {
                        return semantic(n.pos, format!("`{}` does not map to `{}`", n.value, name(0)?.value));
                    }
                }
                let s = tryc!(sup_factorization(&f, &g, &opts));
                Ok((0, json!({
                    "sup": json::presentation(&s.algebra),
                    "to_target": json::polys(s.to_target.images()),
                    "from_left": json::polys(s.from_left.images()),
                    "from_right": json::polys(s.from_right.images()),
                })))
            }
            "chain" => {
                let a = self.algebra(name(0)?)?;
                let n = number(1)?;
                arity(2)?;
                Ok(self.chain(&a, n))
            }
            "preperfect" => {
                let a = self.algebra(name(0)?)?;
                let po = self.perfection_options(&a, &args[1..], false)?;
                let rep = tryc!(preperfect(&a, &po.cfg));
                let exact = rep.is_exact();
                Ok((if exact { 0 } else { 2 }, preperfection_json(&rep)))
            }
            "certify" => {
                let a = self.algebra(name(0)?)?;
                let cert = self.certificate_arg(&a, args.get(1), pos)?;
                arity(2)?;
                let ok = tryc!(verify_coherent_certificate(&a, &cert));
                let target = tryc!(cert.target(&a));
                let mut levels = Vec::new();
                if ok {
                    for n in 1..=3 {
                        let h = tryc!(frob_image_lazy(&a, n));
                        let w = tryc!(certificate_witness(&a, &h, n, &cert));
                        if tryc!(h.verify_witness(&target, &w)) {
                            levels.push(n);
                        }
                    }
                }
                Ok((0, json!({
                    "verified": ok,
                    "a": json::poly(&cert.a),
                    "r": json::poly(&cert.r),
                    "target": json::poly(&target),
                    "witnessed_levels": levels,
                })))
            }
            "unramified" => {
                let a = self.algebra(name(0)?)?;
                arity(1)?;
                Ok(match tryc!(unramified_check(&a, budgets)) {
                    Unramified::Unramified { etale } => (0, json!({ "status": "unramified", "etale": etale })),
                    Unramified::Ramified => (0, json!({ "status": "ramified" })),
                    Unramified::Unknown(b) => (2, json!({ "status": "unknown", "budget": b.to_string() })),
                })
            }
            "relperfect" => {
                let a = self.algebra(name(0)?)?;
                arity(1)?;
                Ok(match tryc!(is_relatively_perfect(&a, budgets)) {
                    RelativePerfectness::Yes => (0, json!({ "status": "yes" })),
                    RelativePerfectness::No(NotPerfect::KernelElement(k)) => {
                        (0, json!({ "status": "no", "kernel_element": json::poly(&k) }))
                    }
                    RelativePerfectness::No(NotPerfect::NotInImage(g)) => {
                        (0, json!({ "status": "no", "not_in_image": json::poly(&g) }))
                    }
                    RelativePerfectness::Unknown(b) => (2, json!({ "status": "unknown", "budget": b.to_string() })),
                })
            }
            "pi0" | "pi0-ring" => {
                let a = self.algebra(name(0)?)?;
                arity(1)?;
                let d = tryc!(split_components(&a, &self.split_config()));
                let code = if d.is_exact() { 0 } else { 2 };
                let mut v = components_json(&d);
                if cmd.name.value == "pi0-ring" {
                    let (ring, map) = tryc!(pi0_ring(&d, &opts));
                    let obj = v.as_object_mut().expect("object");
                    obj.insert("ring".into(), json::presentation(&ring));
                    obj.insert("images".into(), json::polys(map.images()));
                }
                Ok((code, v))
            }
            "gpd-close" => {
                let p = self.pregroupoid_arg(args.first().ok_or(ScriptError::Semantic { pos, message: "`gpd-close` needs a pregroupoid".into() })?)?;
                arity(1)?;
                Ok(self.gpd_close(&p))
            }
            "gpd-verify" => {
                let p = self.pregroupoid_arg(args.first().ok_or(ScriptError::Semantic { pos, message: "`gpd-verify` needs a pregroupoid".into() })?)?;
                arity(1)?;
                Ok(self.gpd_verify(&p))
            }
            "crosscheck" => {
                let a = self.algebra(name(0)?)?;
                let po = self.perfection_options(&a, &args[1..], true)?;
                self.crosscheck(&a, &po).or_else(|e| core(pos, e))
            }
            other => semantic(pos, format!("unknown command `{other}`")),
        }
    }

    fn split_config(&self) -> SplitConfig {
        SplitConfig { budgets: self.config.budgets, seed: self.config.seed, ..Default::default() }
    }

    fn polys_arg(&self, a: &Presentation, arg: Option<&Arg>, pos: Pos) -> Result<Vec<Poly>, ScriptError> {
        match arg {
            Some(Arg::List(items, _)) => items.iter().map(|t| parse_in(a.ring(), t)).collect(),
            Some(other) => semantic(other.pos(), "expected a parenthesized list"),
            None => semantic(pos, "expected a parenthesized list"),
        }
    }

    fn certificate_arg(&self, a: &Presentation, arg: Option<&Arg>, pos: Pos) -> Result<CoherentCertificate, ScriptError> {
        let polys = self.polys_arg(a, arg, pos)?;
        match <[Poly; 2]>::try_from(polys) {
            Ok([x, r]) => Ok(CoherentCertificate::new(x, r)),
            Err(_) => semantic(arg.map_or(pos, Arg::pos), "a certificate is a pair (a, r)"),
        }
    }

    fn perfection_options(&self, a: &Presentation, args: &[Arg], crosscheck: bool) -> Result<PerfectionOptions, ScriptError> {
        let mut cfg = PreperfectConfig { max_steps: self.config.max_steps, budgets: self.config.budgets, ..Default::default() };
        let mut assume = false;
        let mut k = 0;
        while k < args.len() {
            let Arg::Word(w) = &args[k] else {
                return semantic(args[k].pos(), "expected `steps`, `probe` or `cert`");
            };
            match w.value.as_str() {
                "steps" => match args.get(k + 1) {
                    Some(Arg::Number(n)) if n.value >= 1 && n.value <= 16 => cfg.max_steps = n.value as u32,
                    Some(other) => return semantic(other.pos(), "expected a step count between 1 and 16"),
                    None => return semantic(w.pos, "expected a step count"),
                },
                "probe" => cfg.probes.extend(self.polys_arg(a, args.get(k + 1), w.pos)?),
                "cert" => cfg.certificates.push(self.certificate_arg(a, args.get(k + 1), w.pos)?),
                "assume" if crosscheck => {
                    assume = true;
                    k += 1;
                    continue;
                }
                _ => {
                    let mut expected = "expected `steps`, `probe` or `cert`".to_string();
                    if crosscheck {
                        expected.push_str(" or `assume`");
                    }
                    return semantic(w.pos, expected);
                }
            }
            k += 2;
        }
        Ok(PerfectionOptions { cfg, assume })
    }

    fn chain(&self, a: &Arc<Presentation>, n: u32) -> (i32, Value) {
        let budgets = &self.config.budgets;
        let mut levels = Vec::new();
        let mut prev: Option<SubalgebraHandle> = None;
        let mut stable_from = Value::Null;
        for k in 1..=n {
            let step = || -> frobperf_core::Result<(SubalgebraHandle, Value, bool)> {
                let h = frob_image_subalgebra(a, k, budgets)?;
                let (pres, _) = h.presentation(&self.config.opts())?;
                let equal = match &prev {
                    Some(p) => p.contained_in(&h, budgets)?,
                    None => false,
                };
                let v = json!({ "level": k, "generators": json::polys(h.generators()), "presentation": json::presentation(&pres) });
                Ok((h, v, equal))
            };
            match step() {
                Ok((h, v, equal)) => {
                    if equal && stable_from.is_null() {
                        stable_from = json!(k - 1);
                    }
                    levels.push(v);
                    prev = Some(h);
                }
                Err(frobperf_core::Error::BudgetExceeded(b)) => {
                    return (2, json!({ "status": "truncated", "level": k, "budget": b.to_string(), "levels": levels }));
                }
                Err(e) => return (1, json!({ "status": "error", "message": e.to_string(), "levels": levels })),
            }
        }
        (0, json!({ "status": "complete", "levels": levels, "stable_from": stable_from }))
    }

    fn gpd_close(&self, p: &Pregroupoid) -> (i32, Value) {
        let violations = p.validate();
        if !violations.is_empty() {
            return (1, json!({ "status": "invalid", "violations": violations_json(&violations) }));
        }
        match groupoid_closure(p, &self.config.closure) {
            Ok(cl) => closure_json(p, &cl),
            Err(e) => (1, json!({ "status": "error", "message": e.to_string() })),
        }
    }

    fn gpd_verify(&self, p: &Pregroupoid) -> (i32, Value) {
        let violations = p.validate();
        if !violations.is_empty() {
            return (1, json!({ "status": "invalid", "valid": false, "violations": violations_json(&violations) }));
        }
        let cl = match groupoid_closure(p, &self.config.closure) {
            Ok(cl) => cl,
            Err(e) => return (1, json!({ "status": "error", "message": e.to_string() })),
        };
        let Some(g) = cl.groupoid.clone() else {
            let (_, v) = closure_json(p, &cl);
            return (2, json!({ "status": "indeterminate", "valid": true, "closure": v }));
        };
        let samples = sample_targets(p, &g, &cl.canonical);
        let names: Vec<Value> = samples.iter().map(|(label, _, _)| Value::String(label.clone())).collect();
        let pairs: Vec<(Groupoid, GroupoidMap)> = samples.into_iter().map(|(_, t, f)| (t, f)).collect();
        let verdict = verify_universal_property(p, &cl, &pairs, self.config.search_nodes);
        let identity_unique = matches!(
            factorizations(&cl, &g, &cl.canonical, self.config.search_nodes),
            Ok(Factorization::Unique(ref m)) if m.arrows.iter().enumerate().all(|(k, &x)| k == x)
        );
        let closure_bij = g.to_pregroupoid().structure_maps_bijective();
        let canonical_ok = morphism_violations(p, &g, &cl.canonical).is_empty();
        let (code, status) = match &verdict {
            Ok(UniversalVerdict::Holds) if identity_unique && canonical_ok => (0, "holds".to_string()),
            Ok(UniversalVerdict::Holds) => (1, "fails".to_string()),
            Ok(UniversalVerdict::Fails { sample, .. }) => (1, format!("fails on sample {sample}")),
            Ok(UniversalVerdict::Indeterminate { .. }) => (2, "indeterminate".to_string()),
            Err(e) => (1, format!("error: {e}")),
        };
        (code, json!({
            "status": status,
            "valid": true,
            "closure_arrows": g.arrows.len(),
            "bijective": { "pairs": closure_bij.0, "triples": closure_bij.1 },
            "canonical_is_morphism": canonical_ok,
            "identity_factorization_unique": identity_unique,
            "samples": names,
        }))
    }

    fn crosscheck(&self, a: &Arc<Presentation>, po: &PerfectionOptions) -> frobperf_core::Result<(i32, Value)> {
        let budgets = &self.config.budgets;
        let rep = preperfect(a, &po.cfg)?;
        let (pi0_map, components) = match a.base() {
            Base::Field(_) => {
                let d = split_components(a, &self.split_config())?;
                let (_, map) = pi0_ring(&d, &self.config.opts())?;
                (map, Some(d))
            }
            Base::Algebra(_) => (rep.candidate.inclusion.clone(), None),
        };
        let cc = pi0_crosscheck(&pi0_map, &rep.candidate, po.assume, budgets)?;
        let verdict = |v: &ArrowVerdict| match v {
            ArrowVerdict::Isomorphism => json!({ "verdict": "isomorphism" }),
            ArrowVerdict::NotIsomorphism(why) => json!({ "verdict": "not_isomorphism", "reason": why }),
            ArrowVerdict::Indeterminate(why) => json!({ "verdict": "indeterminate", "reason": why }),
        };
        let definite = |v: &ArrowVerdict| !matches!(v, ArrowVerdict::Indeterminate(_));
        let code = if definite(&cc.etale_to_pi0) && definite(&cc.pi0_to_preperfection) { 0 } else { 2 };
        let pi0_source = match &components {
            Some(_) => "components",
            None => "preperfection_candidate",
        };
        Ok((code, json!({
            "pi0": {
                "source": pi0_source,
                "ring": json::presentation(pi0_map.source()),
                "images": json::polys(pi0_map.images()),
                "exact": components.as_ref().map_or(rep.is_exact(), ComponentDecomposition::is_exact),
            },
            "preperfection": {
                "status": status_name(&rep.status),
                "candidate": candidate_json(&rep.candidate),
            },
            "same_subalgebra": cc.same_subalgebra,
            "pi0_unramified": unramified_name(cc.pi0_unramified),
            "verdicts": {
                "etale_to_pi0": verdict(&cc.etale_to_pi0),
                "pi0_to_preperfection": verdict(&cc.pi0_to_preperfection),
            },
            "counterexample": cc.counterexample,
            "pi0_answer": cc.pi0_answer.as_ref().map(candidate_json),
        })))
    }
}

struct PerfectionOptions {
    cfg: PreperfectConfig,
    assume: bool,
}

fn combine(a: i32, b: i32) -> i32 {
    match (a, b) {
        (1, _) | (_, 1) => 1,
        (2, _) | (_, 2) => 2,
        _ => 0,
    }
}

fn command_text(cmd: &Command) -> String {
    let mut s = cmd.name.value.clone();
    for a in &cmd.args {
        s.push(' ');
        match a {
            Arg::Word(w) => s.push_str(&w.value),
            Arg::Number(n) => s.push_str(&n.value.to_string()),
            Arg::Text(t) => s.push_str(&format!("\"{}\"", t.value)),
            Arg::List(items, _) => {
                s.push('(');
                s.push_str(&items.iter().map(|i| i.value.as_str()).collect::<Vec<_>>().join(", "));
                s.push(')');
            }
        }
    }
    s
}

fn status_name(s: &ChainStatus) -> &'static str {
    match s {
        ChainStatus::Stabilized { .. } => "stabilized",
        ChainStatus::NotStabilized { .. } => "not_stabilized",
        ChainStatus::Truncated { .. } => "truncated",
    }
}

fn unramified_name(u: Unramified) -> &'static str {
    match u {
        Unramified::Unramified { etale: true } => "etale",
        Unramified::Unramified { etale: false } => "unramified",
        Unramified::Ramified => "ramified",
        Unramified::Unknown(_) => "unknown",
    }
}

fn evidence_name(e: Evidence) -> &'static str {
    match e {
        Evidence::StabilizedChain { .. } => "stabilized_chain",
        Evidence::Bounds => "bounds",
        Evidence::LowerBound => "lower_bound",
        Evidence::Pi0Backed => "pi0_backed",
    }
}

fn candidate_json(c: &Candidate) -> Value {
    json!({
        "presentation": json::presentation(&c.presentation),
        "images": json::polys(c.inclusion.images()),
        "evidence": evidence_name(c.evidence),
        "exact": c.is_exact(),
    })
}

pub fn preperfection_json(rep: &PreperfectionReport) -> Value {
    let mut v = Map::new();
    v.insert("status".into(), json!(status_name(&rep.status)));
    match rep.status {
        ChainStatus::Stabilized { at } => {
            v.insert("at".into(), json!(at));
        }
        ChainStatus::NotStabilized { max_steps } => {
            v.insert("max_steps".into(), json!(max_steps));
        }
        ChainStatus::Truncated { level, budget } => {
            v.insert("level".into(), json!(level));
            v.insert("budget".into(), json!(budget.to_string()));
        }
    }
    let chain: Vec<Value> = rep
        .chain
        .iter()
        .map(|l| {
            json!({
                "level": l.level,
                "generators": json::polys(l.subalgebra.generators()),
                "presentation": json::presentation(&l.presentation),
                "injective": l.injective,
            })
        })
        .collect();
    v.insert("chain".into(), Value::Array(chain));
    let probes: Vec<Value> = rep
        .probes
        .iter()
        .map(|p| json!({ "element": json::poly(&p.element), "first_failure": p.first_failure, "checked_through": p.checked_through }))
        .collect();
    v.insert("probes".into(), Value::Array(probes));
    let falsified: Vec<Value> = rep.falsified().map(|(e, l)| json!({ "element": json::poly(e), "level": l })).collect();
    v.insert("falsified".into(), Value::Array(falsified));
    let certified: Vec<Value> = rep
        .certified
        .iter()
        .map(|c| {
            json!({
                "a": json::poly(&c.certificate.a),
                "r": json::poly(&c.certificate.r),
                "target": json::poly(&c.target),
                "witnessed_levels": c.witnessed_levels,
            })
        })
        .collect();
    v.insert("certified".into(), Value::Array(certified));
    let rejected: Vec<Value> =
        rep.rejected.iter().map(|c| json!({ "a": json::poly(&c.a), "r": json::poly(&c.r) })).collect();
    v.insert("rejected".into(), Value::Array(rejected));
    v.insert("lower_bound".into(), json::polys(&rep.lower_bound));
    let upper = match &rep.upper_bound {
        UpperBound::Level(n) => json!({ "kind": "level", "level": n }),
        UpperBound::Graded { weights } => json!({ "kind": "graded", "weights": weights }),
        UpperBound::Ambient => json!({ "kind": "ambient" }),
    };
    v.insert("upper_bound".into(), upper);
    v.insert("candidate".into(), candidate_json(&rep.candidate));
    Value::Object(v)
}

fn components_json(d: &ComponentDecomposition) -> Value {
    let ideals: Vec<Value> = d.components.iter().map(|c| json::polys(c.ideal.gens())).collect();
    json!({
        "components": d.len(),
        "idempotents": json::polys(&d.idempotents()),
        "ideals": ideals,
        "exact": d.is_exact(),
        "complete": d.complete,
        "disjoint_certified": d.disjoint_certified,
    })
}

fn violations_json(v: &[frobperf_core::groupoid::Violation]) -> Value {
    Value::Array(v.iter().map(|x| json!({ "condition": x.condition, "witness": x.witness })).collect())
}

fn closure_json(p: &Pregroupoid, cl: &frobperf_core::groupoid::GroupoidClosure) -> (i32, Value) {
    match (&cl.status, &cl.groupoid) {
        (ClosureStatus::Closed { iterations }, Some(g)) => {
            let bij = g.to_pregroupoid().structure_maps_bijective();
            let code = if bij == (true, true) { 0 } else { 1 };
            (code, json!({
                "status": "closed",
                "iterations": iterations,
                "arrows": g.arrows.len(),
                "bijective": { "pairs": bij.0, "triples": bij.1 },
                "closure": json::groupoid(g),
                "canonical": json::groupoid_map(p, g, &cl.canonical),
            }))
        }
        (status, _) => {
            let (label, iterations, arrows) = match status {
                ClosureStatus::IterationLimit { iterations, arrows } => ("iteration_limit", iterations, arrows),
                ClosureStatus::ArrowLimit { iterations, arrows } => ("arrow_limit", iterations, arrows),
                ClosureStatus::Closed { iterations } => ("closed", iterations, &0),
            };
            (2, json!({ "status": label, "iterations": iterations, "arrows": arrows, "stage_arrows": cl.stage_arrows.len() }))
        }
    }
}

/// Morphisms `P → G` to test factorization against: the closure itself,
/// the pair groupoid on the objects, the trivial map to ℤ/2 and the first
/// nontrivial map to ℤ/2 found by search.
fn sample_targets(p: &Pregroupoid, closure: &Groupoid, canonical: &GroupoidMap) -> Vec<(String, Groupoid, GroupoidMap)> {
    let mut out = vec![("closure".to_string(), closure.clone(), canonical.clone())];
    let n = p.objects.len();
    let pair = Groupoid::pair(&p.objects);
    let to_pair = GroupoidMap { objects: (0..n).collect(), arrows: (0..p.arrows.len()).map(|a| p.t(a) * n + p.s[a]).collect() };
    if morphism_violations(p, &pair, &to_pair).is_empty() {
        out.push(("pair groupoid".to_string(), pair, to_pair));
    }
    let z2 = Groupoid::cyclic(2);
    let trivial = GroupoidMap { objects: vec![0; n], arrows: vec![0; p.arrows.len()] };
    out.push(("Z/2 trivial".to_string(), z2.clone(), trivial));
    if let Some(f) = nontrivial_z2(p) {
        out.push(("Z/2".to_string(), z2, f));
    }
    out
}

/// A map `P → ℤ/2` that is nontrivial on some arrow, by search over
/// assignments that respect inverses, identities and composites, starting
/// from the one that sends every arrow to the generator.
fn nontrivial_z2(p: &Pregroupoid) -> Option<GroupoidMap> {
    let nr = p.arrows.len();
    if nr > 24 {
        return None;
    }
    let identities: std::collections::BTreeSet<usize> = p.e.iter().copied().collect();
    let free: Vec<usize> = (0..nr).filter(|&a| !identities.contains(&a) && p.i_r[a] >= a).collect();
    let z2 = Groupoid::cyclic(2);
    for mask in (1u32..(1u32 << free.len().min(16))).rev() {
        let mut arrows = vec![0; nr];
        for (bit, &a) in free.iter().enumerate() {
            let v = ((mask >> bit) & 1) as usize;
            arrows[a] = v;
            arrows[p.i_r[a]] = v;
        }
        let f = GroupoidMap { objects: vec![0; p.objects.len()], arrows };
        if morphism_violations(p, &z2, &f).is_empty() {
            return Some(f);
        }
    }
    None
}
