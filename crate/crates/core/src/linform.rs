//! Affine-linear forms over [`Scalar`], staged elimination and case-split
//! proofs.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::scalar::{Field, Rational, Scalar, ScalarError, Substitution, Sym};

/// Function whose directional derivatives appear as unknowns.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum CoefFn {
    A,
    B,
    C,
}

impl CoefFn {
    pub fn name(self) -> &'static str {
        match self {
            CoefFn::A => "a",
            CoefFn::B => "b",
            CoefFn::C => "c",
        }
    }

    pub fn from_name(s: &str) -> Option<CoefFn> {
        match s {
            "a" => Some(CoefFn::A),
            "b" => Some(CoefFn::B),
            "c" => Some(CoefFn::C),
            _ => None,
        }
    }

    pub const ALL: [CoefFn; 3] = [CoefFn::A, CoefFn::B, CoefFn::C];
}

/// Formal unknown: a component `h(i,j)` of the shape operator (stored with
/// `i <= j`) or the derivative of `a`, `b` or `c` along frame direction `k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Unknown {
    H(u8, u8),
    Deriv(u8, CoefFn),
}

impl Unknown {
    pub fn h(i: usize, j: usize) -> Unknown {
        assert!((1..=5).contains(&i) && (1..=5).contains(&j), "h({i},{j}) out of range");
        let (a, b) = if i <= j { (i, j) } else { (j, i) };
        Unknown::H(a as u8, b as u8)
    }

    pub fn deriv(dir: usize, f: CoefFn) -> Unknown {
        assert!((1..=5).contains(&dir), "direction {dir} out of range");
        Unknown::Deriv(dir as u8, f)
    }

    pub fn is_diagonal(self) -> bool {
        matches!(self, Unknown::H(i, j) if i == j)
    }
}

impl fmt::Display for Unknown {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Unknown::H(i, j) => write!(f, "h{i}{j}"),
            Unknown::Deriv(k, g) => write!(f, "D{k}({})", g.name()),
        }
    }
}

/// `sum coeff[u] * u + constant`.
#[derive(Clone, Debug)]
pub struct LinForm {
    coeffs: BTreeMap<Unknown, Scalar>,
    constant: Scalar,
}

impl PartialEq for LinForm {
    fn eq(&self, other: &Self) -> bool {
        self.sub(other).is_zero()
    }
}

impl LinForm {
    pub fn zero(field: &Arc<Field>) -> LinForm {
        LinForm {
            coeffs: BTreeMap::new(),
            constant: Scalar::zero(field),
        }
    }

    pub fn constant(c: Scalar) -> LinForm {
        LinForm {
            coeffs: BTreeMap::new(),
            constant: c,
        }
    }

    pub fn unknown(field: &Arc<Field>, u: Unknown) -> LinForm {
        LinForm::term(u, Scalar::one(field))
    }

    pub fn term(u: Unknown, c: Scalar) -> LinForm {
        let field = c.field().clone();
        let mut coeffs = BTreeMap::new();
        if !c.is_zero() {
            coeffs.insert(u, c);
        }
        LinForm {
            coeffs,
            constant: Scalar::zero(&field),
        }
    }

    pub fn field(&self) -> &Arc<Field> {
        self.constant.field()
    }

    pub fn coeff(&self, u: Unknown) -> Scalar {
        self.coeffs
            .get(&u)
            .cloned()
            .unwrap_or_else(|| Scalar::zero(self.field()))
    }

    pub fn constant_term(&self) -> &Scalar {
        &self.constant
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Unknown, &Scalar)> {
        self.coeffs.iter()
    }

    pub fn unknowns(&self) -> Vec<Unknown> {
        self.coeffs.keys().copied().collect()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty() && self.constant.is_zero()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add(&self, other: &LinForm) -> LinForm {
        let mut coeffs = self.coeffs.clone();
        for (u, c) in &other.coeffs {
            let sum = match coeffs.get(u) {
                Some(a) => a + c,
                None => c.clone(),
            };
            if sum.is_zero() {
                coeffs.remove(u);
            } else {
                coeffs.insert(*u, sum);
            }
        }
        LinForm {
            coeffs,
            constant: &self.constant + &other.constant,
        }
    }

    pub fn neg(&self) -> LinForm {
        LinForm {
            coeffs: self.coeffs.iter().map(|(u, c)| (*u, -c)).collect(),
            constant: -&self.constant,
        }
    }

    pub fn sub(&self, other: &LinForm) -> LinForm {
        self.add(&other.neg())
    }

    pub fn scale(&self, k: &Scalar) -> LinForm {
        if k.is_zero() {
            return LinForm::zero(self.field());
        }
        LinForm {
            coeffs: self
                .coeffs
                .iter()
                .filter_map(|(u, c)| {
                    let p = c * k;
                    (!p.is_zero()).then_some((*u, p))
                })
                .collect(),
            constant: &self.constant * k,
        }
    }

    /// Product of two forms, allowed when one of them is constant.
    pub fn mul(&self, other: &LinForm) -> Option<LinForm> {
        if other.is_constant() {
            Some(self.scale(&other.constant))
        } else if self.is_constant() {
            Some(other.scale(&self.constant))
        } else {
            None
        }
    }

    pub fn div(&self, k: &Scalar) -> Result<LinForm, ScalarError> {
        let inv = k.recip()?;
        Ok(self.scale(&inv))
    }

    /// Replaces the unknown `u` by `value`.
    pub fn replace(&self, u: Unknown, value: &LinForm) -> LinForm {
        match self.coeffs.get(&u) {
            None => self.clone(),
            Some(c) => {
                let mut rest = self.clone();
                rest.coeffs.remove(&u);
                rest.add(&value.scale(c))
            }
        }
    }

    pub fn apply(&self, sub: &Substitution) -> Result<LinForm, ScalarError> {
        let mut coeffs = BTreeMap::new();
        for (u, c) in &self.coeffs {
            let v = sub.apply(c)?;
            if !v.is_zero() {
                coeffs.insert(*u, v);
            }
        }
        Ok(LinForm {
            coeffs,
            constant: sub.apply(&self.constant)?,
        })
    }

    pub fn rebase(&self, field: &Arc<Field>) -> LinForm {
        LinForm {
            coeffs: self
                .coeffs
                .iter()
                .filter_map(|(u, c)| {
                    let v = c.rebase(field);
                    (!v.is_zero()).then_some((*u, v))
                })
                .collect(),
            constant: self.constant.rebase(field),
        }
    }

    /// Symbols appearing in any coefficient.
    pub fn symbols(&self) -> Vec<Sym> {
        let mut out: Vec<Sym> = self
            .coeffs
            .values()
            .chain(std::iter::once(&self.constant))
            .flat_map(|c| c.symbols())
            .collect();
        out.sort();
        out.dedup();
        out
    }
}

fn fmt_coeff(c: &Scalar) -> (bool, String) {
    if let Some(r) = c.as_rational() {
        let neg = r < Rational::from_integer(0.into());
        let a = if neg { -r } else { r };
        let s = crate::scalar::fmt_rational(&a);
        return (neg, if s == "1" { String::new() } else { s });
    }
    let text = c.to_string();
    if c.denominator().is_one() && c.numerator().len() == 1 {
        if let Some(stripped) = text.strip_prefix('-') {
            return (true, stripped.to_string());
        }
        return (false, text);
    }
    (false, format!("({text})"))
}

impl fmt::Display for LinForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (u, c) in &self.coeffs {
            let (neg, body) = fmt_coeff(c);
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            if body.is_empty() {
                write!(f, "{u}")?;
            } else {
                write!(f, "{body}*{u}")?;
            }
            first = false;
        }
        if !self.constant.is_zero() {
            let (neg, body) = fmt_coeff(&self.constant);
            let body = if body.is_empty() { "1".to_string() } else { body };
            if first {
                write!(f, "{}{body}", if neg { "-" } else { "" })?;
            } else {
                write!(f, "{}{body}", if neg { " - " } else { " + " })?;
            }
        }
        Ok(())
    }
}

/// Linear system split into stages; each stage is solved under the relations
/// obtained from the stages before it.
#[derive(Clone, Debug)]
pub struct EqSystem {
    pub field: Arc<Field>,
    pub stages: Vec<Vec<LinForm>>,
}

impl EqSystem {
    pub fn new(field: &Arc<Field>) -> EqSystem {
        EqSystem {
            field: field.clone(),
            stages: Vec::new(),
        }
    }

    pub fn single(field: &Arc<Field>, eqs: Vec<LinForm>) -> EqSystem {
        EqSystem {
            field: field.clone(),
            stages: vec![eqs],
        }
    }

    pub fn push_stage(&mut self, eqs: Vec<LinForm>) {
        self.stages.push(eqs);
    }

    pub fn equations(&self) -> impl Iterator<Item = &LinForm> {
        self.stages.iter().flatten()
    }

    pub fn apply(&self, sub: &Substitution) -> Result<EqSystem, ScalarError> {
        Ok(EqSystem {
            field: sub.to.clone(),
            stages: self
                .stages
                .iter()
                .map(|s| s.iter().map(|e| e.apply(sub)).collect::<Result<Vec<_>, _>>())
                .collect::<Result<_, _>>()?,
        })
    }
}

/// Incremental Gaussian elimination. Pivots are taken only on coefficients
/// that are rational constants or provable units; other equations are kept
/// as residuals and retried after every new pivot.
#[derive(Clone, Debug)]
pub struct Solver {
    field: Arc<Field>,
    relations: BTreeMap<Unknown, LinForm>,
    residual: Vec<LinForm>,
    contradiction: Option<LinForm>,
}

impl Solver {
    pub fn new(field: &Arc<Field>) -> Solver {
        Solver {
            field: field.clone(),
            relations: BTreeMap::new(),
            residual: Vec::new(),
            contradiction: None,
        }
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    pub fn relations(&self) -> &BTreeMap<Unknown, LinForm> {
        &self.relations
    }

    pub fn residual(&self) -> &[LinForm] {
        &self.residual
    }

    pub fn contradiction(&self) -> Option<&LinForm> {
        self.contradiction.as_ref()
    }

    pub fn reduce(&self, form: &LinForm) -> LinForm {
        let mut out = form.clone();
        for u in form.unknowns() {
            if let Some(v) = self.relations.get(&u) {
                out = out.replace(u, v);
            }
        }
        out
    }

    fn pivot(form: &LinForm) -> Option<Unknown> {
        let mut best: Option<(u8, Unknown)> = None;
        for (u, c) in form.terms() {
            let class = if c.is_constant() {
                0
            } else if c.is_unit() {
                1
            } else {
                continue;
            };
            match best {
                Some((b, _)) if b < class => {}
                _ => best = Some((class, *u)),
            }
        }
        best.map(|(_, u)| u)
    }

    /// Adds one equation `form = 0`. Returns the pivot used, if any.
    pub fn add(&mut self, form: &LinForm) -> Option<Unknown> {
        let pivot = self.add_one(form);
        if pivot.is_some() {
            self.retry_residuals();
        }
        pivot
    }

    fn add_one(&mut self, form: &LinForm) -> Option<Unknown> {
        let r = self.reduce(form);
        if r.is_constant() {
            let c = r.constant_term();
            if c.is_zero() {
                return None;
            }
            if c.is_unit() {
                if self.contradiction.is_none() {
                    self.contradiction = Some(r);
                }
            } else {
                self.residual.push(r);
            }
            return None;
        }
        let Some(u) = Self::pivot(&r) else {
            self.residual.push(r);
            return None;
        };
        let c = r.coeff(u);
        let mut rest = r.clone();
        rest.coeffs.remove(&u);
        let value = rest
            .neg()
            .div(&c)
            .expect("pivot coefficient is a unit by construction");
        for v in self.relations.values_mut() {
            *v = v.replace(u, &value);
        }
        self.relations.insert(u, value);
        Some(u)
    }

    fn retry_residuals(&mut self) {
        loop {
            let pending = std::mem::take(&mut self.residual);
            let mut progress = false;
            for r in pending {
                let red = self.reduce(&r);
                if red.is_zero() {
                    progress = true;
                    continue;
                }
                let usable = if red.is_constant() {
                    red.constant_term().is_unit()
                } else {
                    Self::pivot(&red).is_some()
                };
                if usable {
                    self.add_one(&red);
                    progress = true;
                } else {
                    self.residual.push(red);
                }
            }
            if !progress {
                break;
            }
        }
        // keep residuals reduced and deduplicated
        let mut seen: Vec<LinForm> = Vec::new();
        for r in std::mem::take(&mut self.residual) {
            let red = self.reduce(&r);
            if red.is_zero() || seen.contains(&red) {
                continue;
            }
            seen.push(red);
        }
        self.residual = seen;
    }

    pub fn solution(&self) -> Solution {
        Solution {
            relations: self.relations.clone(),
            residual: self.residual.clone(),
            contradiction: self.contradiction.clone(),
        }
    }
}

/// Output of [`eliminate`].
#[derive(Clone, Debug)]
pub struct Solution {
    /// `unknown = form` with the form free of solved unknowns.
    pub relations: BTreeMap<Unknown, LinForm>,
    /// Equations that could not be pivoted (non-unit coefficients).
    pub residual: Vec<LinForm>,
    /// `0 = unit`, if the system is inconsistent.
    pub contradiction: Option<LinForm>,
}

impl Solution {
    pub fn is_contradiction(&self) -> bool {
        self.contradiction.is_some()
    }

    pub fn value(&self, u: Unknown, field: &Arc<Field>) -> LinForm {
        self.relations
            .get(&u)
            .cloned()
            .unwrap_or_else(|| LinForm::unknown(field, u))
    }

    pub fn reduce(&self, form: &LinForm) -> LinForm {
        let mut out = form.clone();
        for u in form.unknowns() {
            if let Some(v) = self.relations.get(&u) {
                out = out.replace(u, v);
            }
        }
        out
    }

    pub fn relation_strings(&self) -> Vec<String> {
        self.relations
            .iter()
            .map(|(u, v)| format!("{u} = {v}"))
            .collect()
    }
}

/// Solves the staged system in order.
pub fn eliminate(sys: &EqSystem) -> Solution {
    let mut solver = Solver::new(&sys.field);
    for stage in &sys.stages {
        for eq in stage {
            solver.add(eq);
        }
    }
    solver.solution()
}

/// Case split on a polynomial `p`: one branch assumes `p != 0`, the other
/// `p = 0`. `p` must be linear in `sym` with a constant coefficient so both
/// branches can be expressed as substitutions.
#[derive(Clone, Debug)]
pub struct Split {
    pub poly: Scalar,
    pub sym: Sym,
}

#[derive(Clone, Debug, Serialize)]
pub struct BranchCertificate {
    pub label: String,
    /// `(symbol, value)` substitutions in application order.
    pub substitutions: Vec<(String, String)>,
    pub relations: Vec<String>,
    pub residual: Vec<String>,
    pub target_reduced: String,
    pub closed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ProofCertificate {
    pub target: String,
    pub split: Option<String>,
    pub branches: Vec<BranchCertificate>,
    pub closed: bool,
}

#[derive(Debug, thiserror::Error)]
pub enum ProofError {
    #[error("split polynomial is not linear in the chosen symbol with constant coefficient")]
    BadSplit,
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

fn run_branch(
    sys: &EqSystem,
    target: &LinForm,
    label: &str,
    subs: &[Substitution],
    sub_text: Vec<(String, String)>,
) -> Result<BranchCertificate, ScalarError> {
    let mut sys = sys.clone();
    let mut target = target.clone();
    for s in subs {
        sys = sys.apply(s)?;
        target = target.apply(s)?;
    }
    let sol = eliminate(&sys);
    let reduced = sol.reduce(&target);
    let closed = sol.is_contradiction() || reduced.is_zero();
    Ok(BranchCertificate {
        label: label.to_string(),
        substitutions: sub_text,
        relations: sol.relation_strings(),
        residual: sol.residual.iter().map(|r| r.to_string()).collect(),
        target_reduced: reduced.to_string(),
        closed,
    })
}

/// Proves `target = 0` from `sys`, optionally splitting on `split = 0` vs
/// `split != 0`.
pub fn prove_by_cases(
    sys: &EqSystem,
    target: &LinForm,
    split: Option<&Split>,
) -> Result<ProofCertificate, ProofError> {
    let Some(split) = split else {
        let b = run_branch(sys, target, "direct", &[], Vec::new())?;
        return Ok(ProofCertificate {
            target: target.to_string(),
            split: None,
            closed: b.closed,
            branches: vec![b],
        });
    };
    let field = sys.field.clone();
    let (k, rest) = linear_part(&split.poly, split.sym).ok_or(ProofError::BadSplit)?;
    // p = k*sym + rest
    // nonzero branch: sym = (u - rest)/k with u a fresh nonvanishing atom
    let (f2, u) = field.with_atom(&format!("nz{}", field.symbols().count()));
    let rest2 = rest.rebase(&f2);
    let k2 = k.rebase(&f2);
    let val_nz = (&Scalar::sym(&f2, u) - &rest2).checked_div(&k2)?;
    let sub_nz = f2.substitute(split.sym, &val_nz)?;
    let sys_nz = EqSystem {
        field: f2.clone(),
        stages: sys
            .stages
            .iter()
            .map(|s| s.iter().map(|e| e.rebase(&f2)).collect())
            .collect(),
    };
    let nz = run_branch(
        &sys_nz,
        &target.rebase(&f2),
        &format!("{} != 0", split.poly),
        &[sub_nz],
        vec![(field.name(split.sym).to_string(), val_nz.to_string())],
    )?;
    let val_z = (-&rest).checked_div(&k)?;
    let sub_z = field.substitute(split.sym, &val_z)?;
    let z = run_branch(
        sys,
        target,
        &format!("{} = 0", split.poly),
        &[sub_z],
        vec![(field.name(split.sym).to_string(), val_z.to_string())],
    )?;
    let closed = nz.closed && z.closed;
    Ok(ProofCertificate {
        target: target.to_string(),
        split: Some(split.poly.to_string()),
        branches: vec![nz, z],
        closed,
    })
}

/// Writes `p = k*sym + rest` with `k` a nonzero rational and `rest` free of
/// `sym`.
fn linear_part(p: &Scalar, sym: Sym) -> Option<(Scalar, Scalar)> {
    if !p.denominator().is_one() {
        return None;
    }
    let field = p.field();
    let mut k = None;
    let mut rest = crate::scalar::Poly::zero();
    for (m, c) in p.numerator().terms() {
        match m.degree_in(sym) {
            0 => rest = rest.add(&crate::scalar::Poly::term(m.clone(), c.clone())),
            1 if m.factors().len() == 1 && k.is_none() => k = Some(c.clone()),
            _ => return None,
        }
    }
    let k = k?;
    Some((Scalar::rational(field, k), Scalar::from_poly(field, rest)))
}

/// Replays a certificate from scratch and checks it closes again.
pub fn replay(sys: &EqSystem, target: &LinForm, split: Option<&Split>, cert: &ProofCertificate) -> bool {
    match prove_by_cases(sys, target, split) {
        Ok(again) => {
            again.closed == cert.closed
                && again.branches.len() == cert.branches.len()
                && again
                    .branches
                    .iter()
                    .zip(&cert.branches)
                    .all(|(a, b)| a.closed == b.closed && a.relations == b.relations)
        }
        Err(_) => false,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Mismatch {
    pub computed: String,
    pub expected: String,
    pub reason: String,
}

/// Finds a unit `kappa` with `computed = kappa * expected`.
pub fn match_up_to_unit(computed: &LinForm, expected: &LinForm) -> Result<Scalar, Mismatch> {
    let field = computed.field().clone();
    let mismatch = |reason: &str| Mismatch {
        computed: computed.to_string(),
        expected: expected.to_string(),
        reason: reason.to_string(),
    };
    if computed.is_zero() && expected.is_zero() {
        return Ok(Scalar::one(&field));
    }
    if computed.is_zero() || expected.is_zero() {
        return Err(mismatch("exactly one side is zero"));
    }
    if computed.unknowns() != expected.unknowns() {
        return Err(mismatch("different unknowns"));
    }
    let pairs: Vec<(Scalar, Scalar)> = computed
        .terms()
        .map(|(u, c)| (c.clone(), expected.coeff(*u)))
        .chain(std::iter::once((
            computed.constant_term().clone(),
            expected.constant_term().clone(),
        )))
        .filter(|(c, e)| !(c.is_zero() && e.is_zero()))
        .collect();
    let mut kappa = None;
    for (c, e) in &pairs {
        if e.is_zero() {
            return Err(mismatch("coefficient present on one side only"));
        }
        if let Some(k) = ratio(c, e) {
            kappa = Some(k);
            break;
        }
    }
    let kappa = kappa.ok_or_else(|| mismatch("no exact coefficient ratio"))?;
    if !kappa.is_unit() {
        return Err(mismatch(&format!("ratio {kappa} is not a unit")));
    }
    if computed.sub(&expected.scale(&kappa)).is_zero() {
        Ok(kappa)
    } else {
        Err(mismatch(&format!("not proportional (trial factor {kappa})")))
    }
}

/// `c / e` when it exists as a scalar.
fn ratio(c: &Scalar, e: &Scalar) -> Option<Scalar> {
    if let Ok(k) = c.checked_div(e) {
        return Some(k);
    }
    let field = c.field();
    if let Some(q) = c.numerator().div_exact(e.numerator()) {
        if let Ok(k) = Scalar::fraction(field, q.mul_mono(e.denominator()), c.denominator().clone()) {
            return Some(k);
        }
    }
    let (unit, rest) = e.split_unit();
    let c2 = c.checked_div(&unit).ok()?;
    let q = c2.numerator().div_exact(rest.numerator())?;
    Scalar::fraction(field, q, c2.denominator().clone()).ok()
}
