//! Replay of the case analysis for the four structure classes from a text
//! script: equation generation, branch bookkeeping and family checks.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use super::{build_ac_frame, reflect_form, reflection_invariant, AcKind, ACFrame, AC_LABELS, NORMAL};
use crate::linform::{match_up_to_unit, CoefFn, LinForm, Solver, Unknown};
use crate::parse::{parse_linform, parse_relations, parse_scalar};
use crate::report::{sha256_hex, Item, Report, Residual};
use crate::scalar::{Field, Scalar, ScalarError, Substitution};
use crate::tensor::Vector;

pub const THEOREM_B_SRC: &str = include_str!("../../data/theorem_b.txt");

const MAX_SCRIPT: usize = 1 << 20;
const MAX_NODES: usize = 64;
const MAX_PATTERNS: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ScriptError {
    #[error("line {0}: {1}")]
    Syntax(usize, String),
    #[error("script exceeds {MAX_SCRIPT} bytes")]
    TooLong,
}

fn syntax<T>(line: usize, msg: impl Into<String>) -> Result<T, ScriptError> {
    Err(ScriptError::Syntax(line, msg.into()))
}

/// One slot of a triple pattern.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VecPat {
    Label(usize),
    Any,
    Set(Vec<VecPat>),
    /// The vector already chosen in slot 0 or 1.
    Slot(usize),
    /// `phi_k` applied to the vector in slot 0 or 1.
    Phi(usize, usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TriplePat(pub [VecPat; 3]);

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Assumption {
    Equal(String, String),
    NonZero(String),
}

impl fmt::Display for Assumption {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Assumption::Equal(s, v) => write!(f, "{s} = {v}"),
            Assumption::NonZero(s) => write!(f, "{s} != 0"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StepKind {
    Derive(Vec<TriplePat>),
    Imply,
    Subst(String, String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub line: usize,
    pub text: String,
    pub kind: StepKind,
    pub expected: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Family {
    pub label: String,
    pub reflected: bool,
    pub relations: Vec<String>,
    pub phi: Vec<String>,
    pub free: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Leaf {
    Contradiction,
    Family(Family),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Node {
    pub name: String,
    pub parent: Option<usize>,
    pub assumption: Option<Assumption>,
    pub steps: Vec<Step>,
    pub children: Vec<usize>,
    pub leaf: Option<(usize, Leaf)>,
    pub line: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expectation {
    Families(Vec<String>),
    Contradiction,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScriptCase {
    pub case: u8,
    pub kind: AcKind,
    pub expect: Expectation,
    pub nodes: Vec<Node>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Script {
    pub cases: Vec<ScriptCase>,
}

impl Script {
    pub fn case(&self, k: u8) -> Option<&ScriptCase> {
        self.cases.iter().find(|c| c.case == k)
    }
}

fn label_index(line: usize, s: &str) -> Result<usize, ScriptError> {
    AC_LABELS[..NORMAL]
        .iter()
        .position(|l| *l == s)
        .map_or_else(|| syntax(line, format!("unknown frame label {s:?}")), Ok)
}

fn parse_vecpat(line: usize, s: &str, slot: usize) -> Result<VecPat, ScriptError> {
    let slot_ref = |t: &str| match t {
        "X" if slot > 0 => Some(0),
        "Y" if slot > 1 => Some(1),
        _ => None,
    };
    if s == "*" {
        return Ok(VecPat::Any);
    }
    if let Some(i) = slot_ref(s) {
        return Ok(VecPat::Slot(i));
    }
    if let Some(inner) = s.strip_prefix('{').and_then(|r| r.strip_suffix('}')) {
        let mut out = Vec::new();
        for part in inner.split(',') {
            match parse_vecpat(line, part.trim(), slot)? {
                p @ (VecPat::Label(_) | VecPat::Slot(_) | VecPat::Phi(..)) => out.push(p),
                _ => return syntax(line, "sets hold labels and references only"),
            }
        }
        return Ok(VecPat::Set(out));
    }
    if let Some(p) = parse_phi_ref(s, slot) {
        return Ok(p);
    }
    Ok(VecPat::Label(label_index(line, s)?))
}

fn parse_phi_ref(s: &str, slot: usize) -> Option<VecPat> {
    let rest = s.strip_prefix("phi")?;
    let (k, arg) = rest.split_once('(')?;
    let arg = arg.strip_suffix(')')?;
    let k: usize = k.parse().ok().filter(|k| (1..=3).contains(k))?;
    match arg {
        "X" if slot > 0 => Some(VecPat::Phi(k, 0)),
        "Y" if slot > 1 => Some(VecPat::Phi(k, 1)),
        _ => None,
    }
}

/// Splits on `sep` outside braces.
fn split_top(s: &str, sep: char) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, ch) in s.char_indices() {
        match ch {
            '{' => depth += 1,
            '}' => depth -= 1,
            c if c == sep && depth == 0 => {
                out.push(&s[start..i]);
                start = i + ch.len_utf8();
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}

fn parse_patterns(line: usize, s: &str) -> Result<Vec<TriplePat>, ScriptError> {
    let mut out = Vec::new();
    for part in split_top(s, ',') {
        let toks: Vec<&str> = part.split_whitespace().collect();
        if toks.len() != 3 {
            return syntax(line, format!("a triple needs three vectors, got {:?}", part.trim()));
        }
        let pats = [
            parse_vecpat(line, toks[0], 0)?,
            parse_vecpat(line, toks[1], 1)?,
            parse_vecpat(line, toks[2], 2)?,
        ];
        out.push(TriplePat(pats));
    }
    if out.len() > MAX_PATTERNS {
        return syntax(line, "too many triples on one line");
    }
    Ok(out)
}

fn relation_list(s: &str) -> Vec<String> {
    s.split(';').map(str::trim).filter(|r| !r.is_empty()).map(String::from).collect()
}

fn parse_assignment(line: usize, s: &str) -> Result<Assumption, ScriptError> {
    if let Some((sym, rhs)) = s.split_once("!=") {
        if rhs.trim() != "0" {
            return syntax(line, "only `sym != 0` is supported");
        }
        return Ok(Assumption::NonZero(sym.trim().to_string()));
    }
    match s.split_once('=') {
        Some((sym, v)) if !sym.trim().is_empty() && !v.trim().is_empty() => {
            Ok(Assumption::Equal(sym.trim().to_string(), v.trim().to_string()))
        }
        _ => syntax(line, format!("expected `sym = value` or `sym != 0`, got {s:?}")),
    }
}

fn parse_family(line: usize, rest: &str) -> Result<Family, ScriptError> {
    let Some((head, body)) = rest.split_once(':') else {
        return syntax(line, "family needs `label: relations`");
    };
    let head: Vec<&str> = head.split_whitespace().collect();
    let (label, reflected) = match head.as_slice() {
        [l] => (l.to_string(), false),
        [l, "reflected"] => (l.to_string(), true),
        _ => return syntax(line, "family header is `label` or `label reflected`"),
    };
    let sections: Vec<&str> = body.split('|').collect();
    if sections.len() > 3 {
        return syntax(line, "too many `|` sections");
    }
    let relations = relation_list(sections[0]);
    let mut phi = Vec::new();
    let mut free = Vec::new();
    for sec in &sections[1..] {
        let t = sec.trim();
        if let Some(names) = t.strip_prefix("free") {
            free.extend(names.split_whitespace().map(String::from));
        } else {
            phi.extend(relation_list(t));
        }
    }
    Ok(Family {
        label,
        reflected,
        relations,
        phi,
        free,
    })
}

/// Parses the script text. Structural checks: dotted branch names name an
/// existing parent, split nodes have exactly two children and no outcome,
/// every leaf ends in an outcome.
pub fn parse_script(text: &str) -> Result<Script, ScriptError> {
    if text.len() > MAX_SCRIPT {
        return Err(ScriptError::TooLong);
    }
    let mut cases: Vec<ScriptCase> = Vec::new();
    let mut current: Option<usize> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let l = raw.trim();
        if l.is_empty() || l.starts_with('#') {
            continue;
        }
        if let Some(h) = l.strip_prefix('[') {
            let Some(h) = h.strip_suffix(']') else {
                return syntax(line, "unterminated header");
            };
            let parts: Vec<&str> = h.split_whitespace().collect();
            let [ "case", k, kind ] = parts.as_slice() else {
                return syntax(line, "header is `[case k kind]`");
            };
            let case: u8 = match k.parse() {
                Ok(c) if (1..=4).contains(&c) => c,
                _ => return syntax(line, format!("case must be 1..4, got {k}")),
            };
            let kind: AcKind = kind.parse().map_err(|e| ScriptError::Syntax(line, e))?;
            if cases.iter().any(|c| c.case == case) {
                return syntax(line, format!("case {case} repeated"));
            }
            cases.push(ScriptCase {
                case,
                kind,
                expect: Expectation::Families(Vec::new()),
                nodes: vec![Node {
                    name: String::new(),
                    parent: None,
                    assumption: None,
                    steps: Vec::new(),
                    children: Vec::new(),
                    leaf: None,
                    line,
                }],
            });
            current = Some(0);
            continue;
        }
        let Some(case) = cases.last_mut() else {
            return syntax(line, "statement outside a case");
        };
        let cur = current.expect("set with the case header");
        if case.nodes[cur].leaf.is_some() && !l.starts_with("branch ") && !l.starts_with("expect ") {
            return syntax(line, "statement after the branch outcome");
        }
        let (word, rest) = l.split_once(char::is_whitespace).unwrap_or((l, ""));
        let rest = rest.trim();
        match word {
            "expect" => {
                case.expect = match rest {
                    "contradiction" => Expectation::Contradiction,
                    r => match r.split_whitespace().collect::<Vec<_>>().as_slice() {
                        ["families", labels @ ..] if !labels.is_empty() => {
                            Expectation::Families(labels.iter().map(|s| s.to_string()).collect())
                        }
                        [single] => Expectation::Families(vec![single.to_string()]),
                        _ => return syntax(line, "expect `contradiction` or `families l1 l2 ..`"),
                    },
                };
            }
            "branch" => {
                let Some((name, cond)) = rest.split_once(':') else {
                    return syntax(line, "branch needs `name: condition`");
                };
                let name = name.trim().to_string();
                if name.is_empty() || name.contains(char::is_whitespace) {
                    return syntax(line, "bad branch name");
                }
                if case.nodes.iter().any(|n| n.name == name) {
                    return syntax(line, format!("branch {name} repeated"));
                }
                let parent_name = name.rsplit_once('.').map_or("", |(p, _)| p);
                let Some(parent) = case.nodes.iter().position(|n| n.name == parent_name) else {
                    return syntax(line, format!("parent branch {parent_name:?} not declared"));
                };
                if case.nodes[parent].leaf.is_some() {
                    return syntax(line, format!("branch {parent_name:?} already has an outcome"));
                }
                if case.nodes[parent].children.len() == 2 {
                    return syntax(line, format!("branch {parent_name:?} already split in two"));
                }
                if case.nodes.len() >= MAX_NODES {
                    return syntax(line, "too many branches");
                }
                let assumption = parse_assignment(line, cond.trim())?;
                let id = case.nodes.len();
                case.nodes.push(Node {
                    name,
                    parent: Some(parent),
                    assumption: Some(assumption),
                    steps: Vec::new(),
                    children: Vec::new(),
                    leaf: None,
                    line,
                });
                case.nodes[parent].children.push(id);
                current = Some(id);
            }
            "derive" | "imply" | "subst" => {
                if !case.nodes[cur].children.is_empty() {
                    return syntax(line, "statement after the node was split");
                }
                let (lhs, rels) = match rest.split_once("=>") {
                    Some((a, b)) => (a.trim(), relation_list(b)),
                    None => (rest, Vec::new()),
                };
                let kind = match word {
                    "derive" => StepKind::Derive(parse_patterns(line, lhs)?),
                    "imply" => {
                        if !rels.is_empty() {
                            return syntax(line, "imply takes relations only");
                        }
                        StepKind::Imply
                    }
                    _ => match parse_assignment(line, lhs)? {
                        Assumption::Equal(s, v) => StepKind::Subst(s, v),
                        Assumption::NonZero(_) => return syntax(line, "subst needs `sym = value`"),
                    },
                };
                let expected = if word == "imply" { relation_list(lhs) } else { rels };
                case.nodes[cur].steps.push(Step {
                    line,
                    text: l.to_string(),
                    kind,
                    expected,
                });
            }
            "contradiction" | "family" => {
                if !case.nodes[cur].children.is_empty() {
                    return syntax(line, "outcome after the node was split");
                }
                let leaf = if word == "family" {
                    Leaf::Family(parse_family(line, rest)?)
                } else if rest.is_empty() {
                    Leaf::Contradiction
                } else {
                    return syntax(line, "contradiction takes no arguments");
                };
                case.nodes[cur].leaf = Some((line, leaf));
            }
            other => return syntax(line, format!("unknown statement {other:?}")),
        }
    }
    for case in &cases {
        for n in &case.nodes {
            match (n.children.len(), &n.leaf) {
                (0, None) => return syntax(n.line, format!("branch {:?} has no outcome", n.name)),
                (1, _) => return syntax(n.line, format!("branch {:?} has a single sub-branch", n.name)),
                _ => {}
            }
        }
        if let Expectation::Families(f) = &case.expect {
            if f.is_empty() {
                return syntax(case.nodes[0].line, format!("case {} has no expectation", case.case));
            }
        }
    }
    if cases.is_empty() {
        return syntax(0, "no cases");
    }
    Ok(Script { cases })
}

/// Parses the shipped script.
pub fn golden_script() -> &'static Script {
    static CELL: std::sync::OnceLock<Script> = std::sync::OnceLock::new();
    CELL.get_or_init(|| parse_script(THEOREM_B_SRC).expect("shipped script parses"))
}

pub fn theorem_b_checksum() -> String {
    sha256_hex(&[THEOREM_B_SRC])
}

enum Transition {
    Subst(Substitution),
    Rebase(Arc<Field>),
}

/// State of one branch: equations are kept in the frame field and carried to
/// the branch field through the recorded transitions.
#[derive(Clone)]
struct Branch {
    field: Arc<Field>,
    chain: Vec<Arc<Transition>>,
    eqs: Vec<LinForm>,
    /// Leading entries of `eqs` that encode the Killing reduction.
    root_len: usize,
    coef: [Scalar; 3],
    frozen: [bool; 3],
    inconsistent: Option<String>,
}

impl Branch {
    fn root(ac: &ACFrame) -> Branch {
        let mut eqs = ac.kcontact_equations();
        eqs.extend(ac.zeta_eigen_equations());
        let root_len = eqs.len();
        eqs.extend(ac.triple_derivative_relations());
        Branch {
            field: ac.field.clone(),
            chain: Vec::new(),
            eqs,
            root_len,
            coef: [0, 1, 2].map(|i| ac.coef_scalar(i)),
            frozen: [false; 3],
            inconsistent: None,
        }
    }

    fn carry(&self, form: &LinForm) -> Result<LinForm, ScalarError> {
        self.chain.iter().try_fold(form.clone(), |acc, t| match &**t {
            Transition::Subst(s) => acc.apply(s),
            Transition::Rebase(f) => Ok(acc.rebase(f)),
        })
    }

    fn carry_scalar(&self, x: &Scalar) -> Result<Scalar, ScalarError> {
        self.chain.iter().try_fold(x.clone(), |acc, t| match &**t {
            Transition::Subst(s) => s.apply(&acc),
            Transition::Rebase(f) => Ok(acc.rebase(f)),
        })
    }

    fn push(&mut self, t: Transition) -> Result<(), ScalarError> {
        let step = |x: &Scalar| match &t {
            Transition::Subst(s) => s.apply(x),
            Transition::Rebase(f) => Ok(x.rebase(f)),
        };
        let coef = [step(&self.coef[0])?, step(&self.coef[1])?, step(&self.coef[2])?];
        self.field = match &t {
            Transition::Subst(s) => s.to.clone(),
            Transition::Rebase(f) => f.clone(),
        };
        self.coef = coef;
        self.chain.push(Arc::new(t));
        // a coefficient that became a number has vanishing derivatives
        for (i, fun) in CoefFn::ALL.into_iter().enumerate() {
            if !self.frozen[i] && self.coef[i].as_rational().is_some() {
                self.frozen[i] = true;
                let base = self.eqs[0].field().clone();
                self.eqs
                    .extend((1..=NORMAL).map(|k| LinForm::unknown(&base, Unknown::deriv(k, fun))));
            }
        }
        Ok(())
    }

    fn substitute(&mut self, name: &str, value: &str) -> Result<(), String> {
        let sym = self
            .field
            .lookup(name)
            .ok_or_else(|| format!("symbol {name} is not free in this branch"))?;
        let v = parse_scalar(&self.field, value).map_err(|e| e.to_string())?;
        match self.field.substitute(sym, &v) {
            Ok(s) => self.push(Transition::Subst(s)).map_err(|e| e.to_string()),
            Err(ScalarError::Contradiction(msg)) => {
                self.inconsistent = Some(msg);
                Ok(())
            }
            Err(e) => Err(e.to_string()),
        }
    }

    fn assume(&mut self, a: &Assumption) -> Result<(), String> {
        match a {
            Assumption::Equal(s, v) => self.substitute(s, v),
            Assumption::NonZero(s) => {
                let sym = self
                    .field
                    .lookup(s)
                    .ok_or_else(|| format!("symbol {s} is not free in this branch"))?;
                let f = self.field.assume_nonzero(sym);
                self.push(Transition::Rebase(f)).map_err(|e| e.to_string())
            }
        }
    }

    fn solver(&self) -> Result<Solver, ScalarError> {
        self.solver_upto(self.eqs.len())
    }

    fn solver_upto(&self, n: usize) -> Result<Solver, ScalarError> {
        let mut s = Solver::new(&self.field);
        for e in &self.eqs[..n] {
            s.add(&self.carry(e)?);
        }
        Ok(s)
    }
}

/// `expected = 0` follows from the solver state: it reduces to zero or to a
/// unit multiple of an unresolved equation.
fn implied(solver: &Solver, expected: &LinForm) -> bool {
    let r = solver.reduce(expected);
    r.is_zero()
        || solver
            .residual()
            .iter()
            .any(|q| match_up_to_unit(&r, &solver.reduce(q)).is_ok())
}

#[derive(Clone, Debug, Serialize)]
pub struct RelationCheck {
    pub expected: String,
    pub reduced: String,
    pub implied: bool,
    /// Triples of this step whose own equation already gives the relation.
    pub witnesses: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct StepReport {
    pub branch: String,
    pub line: usize,
    pub text: String,
    pub equations: usize,
    pub checks: Vec<RelationCheck>,
    pub error: Option<String>,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub enum BranchOutcome {
    Contradiction(String),
    Family {
        label: String,
        reflected: bool,
        relations: Vec<String>,
        coefficients: [String; 3],
    },
    Failed(String),
}

#[derive(Clone, Debug, Serialize)]
pub struct LeafReport {
    pub branch: String,
    pub assumptions: Vec<String>,
    pub outcome: BranchOutcome,
    pub checks: Vec<RelationCheck>,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SplitReport {
    pub branch: String,
    pub split: Vec<String>,
    pub exhaustive: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct CaseReport {
    pub case: u8,
    pub kind: AcKind,
    pub steps: Vec<StepReport>,
    pub splits: Vec<SplitReport>,
    pub leaves: Vec<LeafReport>,
    pub families: Vec<String>,
    pub expected_families: Vec<String>,
    pub reflection_checked: bool,
    pub passed: bool,
}

fn vector_label(v: &Vector) -> String {
    let mut parts = Vec::new();
    for (i, c) in v.0.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let name = AC_LABELS[i];
        parts.push(if c.is_one() {
            name.to_string()
        } else if (-c).is_one() {
            format!("-{name}")
        } else {
            format!("({c})*{name}")
        });
    }
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join("+")
    }
}

fn expand(ac: &ACFrame, pat: &TriplePat) -> Vec<[Vector; 3]> {
    let mut out = Vec::new();
    fn choices(ac: &ACFrame, p: &VecPat, chosen: &[Vector]) -> Vec<Vector> {
        match p {
            VecPat::Label(i) => vec![ac.e(*i)],
            VecPat::Any => (0..NORMAL).map(|i| ac.e(i)).collect(),
            VecPat::Set(s) => s.iter().flat_map(|q| choices(ac, q, chosen)).collect(),
            VecPat::Slot(k) => vec![chosen[*k].clone()],
            VecPat::Phi(j, k) => vec![ac.phi[j - 1].apply(&chosen[*k])],
        }
    }
    for x in choices(ac, &pat.0[0], &[]) {
        for y in choices(ac, &pat.0[1], std::slice::from_ref(&x)) {
            for z in choices(ac, &pat.0[2], &[x.clone(), y.clone()]) {
                out.push([x.clone(), y.clone(), z]);
            }
        }
    }
    out
}

fn check_relations(
    branch: &Branch,
    solver: &Solver,
    texts: &[String],
    reflected: bool,
    witnesses: &[(String, LinForm)],
) -> Result<Vec<RelationCheck>, String> {
    let mut out = Vec::new();
    for t in texts {
        let forms = parse_relations(&branch.field, t).map_err(|e| format!("{t:?}: {e}"))?;
        for f in forms {
            let f = if reflected { reflect_form(&f) } else { f };
            let r = solver.reduce(&f);
            let ok = implied(solver, &f);
            let mut wit: Vec<String> = witnesses
                .iter()
                .filter(|(_, w)| !w.is_zero() && match_up_to_unit(w, &f).is_ok())
                .map(|(l, _)| l.clone())
                .collect();
            wit.dedup();
            out.push(RelationCheck {
                expected: f.to_string(),
                reduced: r.to_string(),
                implied: ok || !wit.is_empty(),
                witnesses: wit,
            });
        }
    }
    Ok(out)
}

fn run_step(ac: &ACFrame, kind: AcKind, branch: &mut Branch, node: &str, step: &Step) -> StepReport {
    let mut report = StepReport {
        branch: node.to_string(),
        line: step.line,
        text: step.text.clone(),
        equations: 0,
        checks: Vec::new(),
        error: None,
        passed: false,
    };
    let result: Result<(), String> = (|| {
        let before = branch.solver().map_err(|e| e.to_string())?;
        let killing = branch.solver_upto(branch.root_len).map_err(|e| e.to_string())?;
        let mut witnesses = Vec::new();
        match &step.kind {
            StepKind::Derive(pats) => {
                for p in pats {
                    for [x, y, z] in expand(ac, p) {
                        let e = ac.defining_equation(kind, &x, &y, &z);
                        if e.is_zero() {
                            continue;
                        }
                        let carried = branch.carry(&e).map_err(|e| e.to_string())?;
                        let label = format!("({}, {}, {})", vector_label(&x), vector_label(&y), vector_label(&z));
                        witnesses.push((label.clone(), killing.reduce(&carried)));
                        witnesses.push((label, before.reduce(&carried)));
                        branch.eqs.push(e);
                        report.equations += 1;
                    }
                }
            }
            StepKind::Imply => {}
            StepKind::Subst(sym, value) => {
                let solver = branch.solver().map_err(|e| e.to_string())?;
                let rel = vec![format!("{sym} - ({value})")];
                let checks = check_relations(branch, &solver, &rel, false, &[])?;
                let ok = checks.iter().all(|c| c.implied);
                report.checks = checks;
                if !ok {
                    return Err(format!("{sym} = {value} does not follow; open equations: {:?}", solver.residual().iter().map(|r| r.to_string()).collect::<Vec<_>>()));
                }
                branch.substitute(sym, value)?;
                return Ok(());
            }
        }
        let solver = branch.solver().map_err(|e| e.to_string())?;
        report.checks = check_relations(branch, &solver, &step.expected, false, &witnesses)?;
        Ok(())
    })();
    report.passed = result.is_ok() && report.checks.iter().all(|c| c.implied);
    report.error = result.err();
    report
}

fn check_phi(branch: &Branch, base: &Arc<Field>, clause: &str) -> Result<bool, String> {
    if let Some((sym, rhs)) = clause.split_once("!=") {
        if rhs.trim() != "0" {
            return Err(format!("unsupported clause {clause:?}"));
        }
        let s = parse_scalar(base, sym.trim()).map_err(|e| e.to_string())?;
        let v = branch.carry_scalar(&s).map_err(|e| e.to_string())?;
        return Ok(v.is_unit());
    }
    let forms = parse_relations(base, clause).map_err(|e| e.to_string())?;
    let mut ok = true;
    for f in forms {
        if !f.is_constant() {
            return Err(format!("clause {clause:?} mentions unknowns"));
        }
        let v = branch.carry_scalar(f.constant_term()).map_err(|e| e.to_string())?;
        ok &= v.is_zero();
    }
    Ok(ok)
}

fn reflect_scalar_clause(clause: &str) -> String {
    // `a` enters every clause linearly through the coefficient itself
    let mut out = String::new();
    let mut prev_ident = false;
    for ch in clause.chars() {
        if ch == 'a' && !prev_ident {
            out.push_str("(-a)");
        } else {
            out.push(ch);
        }
        prev_ident = ch.is_alphanumeric() || ch == '_';
    }
    out
}

fn run_leaf(branch: &Branch, base: &Arc<Field>, node: &Node, path: Vec<String>, leaf: &Leaf) -> LeafReport {
    let coefficients = branch.coef.clone().map(|c| c.to_string());
    let mut report = LeafReport {
        branch: node.name.clone(),
        assumptions: path,
        outcome: BranchOutcome::Failed(String::new()),
        checks: Vec::new(),
        passed: false,
    };
    let solver = match branch.solver() {
        Ok(s) => Some(s),
        Err(ScalarError::Contradiction(m)) => {
            report.outcome = BranchOutcome::Contradiction(m);
            None
        }
        Err(e) => {
            report.outcome = BranchOutcome::Failed(e.to_string());
            return report;
        }
    };
    let contradiction = branch
        .inconsistent
        .clone()
        .or_else(|| solver.as_ref().and_then(|s| s.contradiction().map(|c| format!("0 = {c}"))));
    match leaf {
        Leaf::Contradiction => {
            report.passed = contradiction.is_some();
            report.outcome = match contradiction {
                Some(c) => BranchOutcome::Contradiction(c),
                None => BranchOutcome::Failed("no contradiction reached".into()),
            };
        }
        Leaf::Family(fam) => {
            let Some(solver) = solver.filter(|_| contradiction.is_none()) else {
                report.outcome = BranchOutcome::Failed("branch is inconsistent".into());
                return report;
            };
            let result: Result<bool, String> = (|| {
                report.checks = check_relations(branch, &solver, &fam.relations, fam.reflected, &[])?;
                let mut ok = report.checks.iter().all(|c| c.implied);
                for clause in &fam.phi {
                    let clause = if fam.reflected {
                        reflect_scalar_clause(clause)
                    } else {
                        clause.clone()
                    };
                    let holds = check_phi(branch, base, &clause)?;
                    report.checks.push(RelationCheck {
                        expected: clause.clone(),
                        reduced: String::new(),
                        implied: holds,
                        witnesses: Vec::new(),
                    });
                    ok &= holds;
                }
                for name in &fam.free {
                    let u = parse_linform(&branch.field, name).map_err(|e| e.to_string())?;
                    let unknowns = u.unknowns();
                    let [single] = unknowns.as_slice() else {
                        return Err(format!("{name} is not a single unknown"));
                    };
                    let free = solver.reduce(&u) == u
                        && !solver.residual().iter().any(|r| !r.coeff(*single).is_zero());
                    report.checks.push(RelationCheck {
                        expected: format!("{name} free"),
                        reduced: solver.reduce(&u).to_string(),
                        implied: free,
                        witnesses: Vec::new(),
                    });
                    ok &= free;
                }
                Ok(ok)
            })();
            match result {
                Ok(ok) => {
                    report.passed = ok;
                    report.outcome = BranchOutcome::Family {
                        label: fam.label.clone(),
                        reflected: fam.reflected,
                        relations: solver.solution().relation_strings(),
                        coefficients,
                    };
                }
                Err(e) => report.outcome = BranchOutcome::Failed(e),
            }
        }
    }
    report
}

/// Whether two sibling assumptions cover every possibility in `branch`.
fn exhaustive(branch: &Branch, a: &Assumption, b: &Assumption) -> bool {
    let value = |s: &str, v: &str| -> Option<Scalar> {
        let sym = branch.field.lookup(s)?;
        let x = Scalar::sym(&branch.field, sym);
        let v = parse_scalar(&branch.field, v).ok()?;
        Some(&x - &v)
    };
    match (a, b) {
        (Assumption::Equal(s, v), Assumption::NonZero(t)) | (Assumption::NonZero(t), Assumption::Equal(s, v)) => {
            s == t && value(s, v).is_some_and(|d| d == Scalar::sym(&branch.field, branch.field.lookup(s).unwrap()))
        }
        (Assumption::Equal(s, v), Assumption::Equal(t, w)) if s == t => {
            match (value(s, v), value(t, w)) {
                (Some(p), Some(q)) => p != q && (&p * &q).is_zero(),
                _ => false,
            }
        }
        _ => false,
    }
}

/// Replays one case of the script.
pub fn run_case(ac: &ACFrame, case: &ScriptCase) -> CaseReport {
    let mut steps = Vec::new();
    let mut splits = Vec::new();
    let mut leaves = Vec::new();
    let base = ac.field.clone();
    // depth-first, parents before children
    let mut stack: Vec<(usize, Branch, Vec<String>)> = vec![(0, Branch::root(ac), Vec::new())];
    while let Some((id, mut branch, path)) = stack.pop() {
        let node = &case.nodes[id];
        let mut ok = true;
        for step in &node.steps {
            if branch.inconsistent.is_some() {
                break;
            }
            let r = run_step(ac, case.kind, &mut branch, &node.name, step);
            ok &= r.passed;
            steps.push(r);
        }
        if let Some((_, leaf)) = &node.leaf {
            let mut lr = run_leaf(&branch, &base, node, path.clone(), leaf);
            lr.passed &= ok;
            leaves.push(lr);
            continue;
        }
        let [c0, c1] = [node.children[0], node.children[1]];
        let (a0, a1) = (
            case.nodes[c0].assumption.clone().expect("children carry assumptions"),
            case.nodes[c1].assumption.clone().expect("children carry assumptions"),
        );
        splits.push(SplitReport {
            branch: node.name.clone(),
            split: vec![a0.to_string(), a1.to_string()],
            exhaustive: exhaustive(&branch, &a0, &a1),
        });
        for (child, a) in [(c1, a1), (c0, a0)] {
            let mut b = branch.clone();
            let mut p = path.clone();
            p.push(a.to_string());
            if let Err(e) = b.assume(&a) {
                leaves.push(LeafReport {
                    branch: case.nodes[child].name.clone(),
                    assumptions: p,
                    outcome: BranchOutcome::Failed(e),
                    checks: Vec::new(),
                    passed: false,
                });
                continue;
            }
            stack.push((child, b, p));
        }
    }
    let mut families: Vec<String> = leaves
        .iter()
        .filter_map(|l| match &l.outcome {
            BranchOutcome::Family { label, .. } => Some(label.clone()),
            _ => None,
        })
        .collect();
    families.sort();
    families.dedup();
    let reflection_needed = leaves
        .iter()
        .any(|l| matches!(l.outcome, BranchOutcome::Family { reflected: true, .. }));
    let reflection_checked = !reflection_needed || reflection_invariant(ac, case.kind);
    let (expected_families, expectation_met) = match &case.expect {
        Expectation::Contradiction => (
            Vec::new(),
            leaves.iter().all(|l| matches!(l.outcome, BranchOutcome::Contradiction(_))),
        ),
        Expectation::Families(f) => {
            let mut f = f.clone();
            f.sort();
            (f.clone(), f == families)
        }
    };
    let passed = expectation_met
        && reflection_checked
        && steps.iter().all(|s| s.passed)
        && leaves.iter().all(|l| l.passed)
        && splits.iter().all(|s| s.exhaustive);
    CaseReport {
        case: case.case,
        kind: case.kind,
        steps,
        splits,
        leaves,
        families,
        expected_families,
        reflection_checked,
        passed,
    }
}

/// Replays the shipped script for the requested cases.
pub fn verify_theorem_b(cases: &[u8]) -> Vec<CaseReport> {
    let ac = build_ac_frame();
    let script = golden_script();
    cases
        .iter()
        .filter_map(|k| script.case(*k))
        .map(|c| run_case(&ac, c))
        .collect()
}

pub fn theorem_b_report(cases: &[CaseReport]) -> Report {
    let mut items = Vec::new();
    for c in cases {
        let pre = format!("B{}", c.case);
        for (i, s) in c.steps.iter().enumerate() {
            let rels: Vec<String> = s
                .checks
                .iter()
                .map(|r| {
                    let w = if r.witnesses.is_empty() {
                        "combined".to_string()
                    } else {
                        r.witnesses.join(" ")
                    };
                    format!("{} [{}]", r.expected, w)
                })
                .collect();
            let bad: Vec<String> = s.checks.iter().filter(|r| !r.implied).map(|r| r.reduced.clone()).collect();
            let mut item = Item::new(format!("{pre}.step{}", i + 1), s.passed)
                .relations(rels)
                .detail(format!("{} (line {}, branch {:?})", s.text, s.line, s.branch));
            if !bad.is_empty() {
                item = item.residual(Residual::Forms(bad));
            }
            if let Some(e) = &s.error {
                item = item.detail(format!("{}: {e}", s.text));
            }
            items.push(item);
        }
        for sp in &c.splits {
            items.push(
                Item::new(format!("{pre}.split[{}]", sp.branch), sp.exhaustive).detail(sp.split.join(" | ")),
            );
        }
        for l in &c.leaves {
            let (what, rels) = match &l.outcome {
                BranchOutcome::Contradiction(m) => (format!("contradiction: {m}"), Vec::new()),
                BranchOutcome::Family {
                    label,
                    reflected,
                    relations,
                    coefficients,
                } => (
                    format!(
                        "family {label}{} with (a, b, c) = ({})",
                        if *reflected { " for the opposite normal" } else { "" },
                        coefficients.join(", ")
                    ),
                    relations.clone(),
                ),
                BranchOutcome::Failed(e) => (format!("failed: {e}"), Vec::new()),
            };
            items.push(
                Item::new(format!("{pre}.leaf[{}]", l.branch), l.passed)
                    .relations(rels)
                    .detail(format!("{} under {}", what, l.assumptions.join(", "))),
            );
        }
        items.push(
            Item::new(format!("{pre}.families"), c.passed).detail(format!(
                "found [{}], expected [{}]",
                c.families.join(" "),
                if c.expected_families.is_empty() {
                    "contradiction".to_string()
                } else {
                    c.expected_families.join(" ")
                }
            )),
        );
    }
    Report::with_data("theorem-b", items, &[THEOREM_B_SRC])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_script_parses() {
        let s = golden_script();
        assert_eq!(s.cases.len(), 4);
        assert_eq!(s.case(2).unwrap().expect, Expectation::Contradiction);
    }

    #[test]
    fn rejects_bad_structure() {
        let bad = [
            "derive zeta zeta xi",
            "[case 5 sasakian]\ncontradiction",
            "[case 1 sasakian]\nexpect x\nbranch a.b: c = 0\ncontradiction",
            "[case 1 sasakian]\nexpect x\nbranch c0: c = 0\ncontradiction",
            "[case 1 sasakian]\nexpect x\nderive zeta zeta",
            "[case 1 sasakian]\nexpect x\nderive zeta Y xi\ncontradiction",
            "[case 1 sasakian]\nexpect x\nfamily x y z: h11",
            "[case 1 sasakian]\nexpect x\ncontradiction\nderive zeta zeta xi",
        ];
        for b in bad {
            assert!(parse_script(b).is_err(), "{b}");
        }
    }

    #[test]
    fn pattern_expansion() {
        let ac = build_ac_frame();
        let p = parse_patterns(1, "{zeta,phi1zeta} X {phi1(X),phi2(X)}").unwrap();
        let t = expand(&ac, &p[0]);
        assert_eq!(t.len(), 4);
        assert_eq!(t[0][2], ac.e(1));
        assert_eq!(t[2][2], ac.e(0).neg());
    }

    fn run_text(text: &str, k: u8) -> CaseReport {
        let script = parse_script(text).unwrap();
        run_case(&build_ac_frame(), script.case(k).unwrap())
    }

    #[test]
    fn shipped_cases_replay() {
        for c in verify_theorem_b(&[1, 2, 3, 4]) {
            assert!(c.passed, "case {}: {:?}", c.case, c.leaves);
        }
    }

    #[test]
    fn wrong_relation_is_reported() {
        let text = THEOREM_B_SRC.replace("a*h11 = 1 - c", "a*h11 = 1 + c");
        let r = run_text(&text, 1);
        assert!(!r.passed);
        assert!(r.steps.iter().any(|s| !s.passed && s.text.contains("1 + c")));
    }

    #[test]
    fn pinned_free_parameter_is_rejected() {
        let text = THEOREM_B_SRC.replace(
            "family a: h11 = 1; h33 = 1 | a = 1; b = 0; c = 0 | free h55",
            "family a: h11 = 1; h33 = 1; h55 = 1 | a = 1; b = 0; c = 0",
        );
        assert!(!run_text(&text, 3).passed);
    }

    #[test]
    fn unreflected_family_does_not_cover_negative_a() {
        let text = THEOREM_B_SRC.replace("family a reflected:", "family a:");
        assert!(!run_text(&text, 3).passed);
    }

    #[test]
    fn non_exhaustive_split_is_rejected() {
        let text = THEOREM_B_SRC.replace("branch c0.t0.m: a = -1", "branch c0.t0.m: a = 2");
        let r = run_text(&text, 3);
        assert!(r.splits.iter().any(|s| !s.exhaustive));
        assert!(!r.passed);
    }

    #[test]
    fn missing_family_fails_expectation() {
        let text = THEOREM_B_SRC.replace("expect families a b c d\nderive {zeta", "expect families a b c d e\nderive {zeta");
        assert!(!run_text(&text, 4).passed);
    }

    #[test]
    fn clause_reflection_only_touches_a() {
        assert_eq!(reflect_scalar_clause("a = 1; b = 0"), "(-a) = 1; b = 0");
        assert_eq!(reflect_scalar_clause("a^2 = 1"), "(-a)^2 = 1");
    }
}
