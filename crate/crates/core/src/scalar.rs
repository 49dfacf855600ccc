//! Exact coefficient field.
//!
//! Scalars are fractions `num / den` where `num` is a polynomial with rational
//! coefficients over a small set of symbols and `den` is a monomial in symbols
//! that are known to be invertible. Symbols may carry a *square relation*
//! `s^2 = R` where `R` does not mention `s`; the normal form keeps the exponent
//! of every such symbol at most one. This covers the Pythagorean pairs
//! (`sin(t)^2 = 1 - cos(t)^2`), unit triples (`c^2 = 1 - a^2 - b^2`) and the
//! atom `rho` attached to `t2^2 = 1 - t1^2 - rho`.
//!
//! Because the leading monomials of the relations are squares of distinct
//! symbols and no replacement mentions a relation symbol, the relation set is
//! its own Groebner basis and the normal form is unique.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

pub type Rational = BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScalarError {
    #[error("division by `{0}`, which is not provably a unit")]
    NotAUnit(String),
    #[error("substitution {sym} -> {value} zeroes a denominator")]
    ZeroesDenominator { sym: String, value: String },
    #[error("substitution contradicts the relation set: {0}")]
    Contradiction(String),
    #[error("unsupported substitution: {0}")]
    Unsupported(String),
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
}

/// Index of a symbol inside its [`Field`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Sym(pub(crate) u16);

impl Sym {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SymKind {
    /// Unconstrained real parameter.
    Free,
    /// Free symbol that is assumed to never vanish.
    Atom,
    Cos,
    /// Sine paired to the cosine symbol it references.
    Sin(Sym),
    /// Member of a unit triple `a^2 + b^2 + c^2 = 1`.
    Triple,
    /// Substituted away; kept so indices stay stable.
    Eliminated,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymInfo {
    pub name: String,
    pub kind: SymKind,
    pub nonvanishing: bool,
    /// `sym^2 = square`, when present.
    pub square: Option<Poly>,
}

/// Monomial as sorted `(symbol, exponent)` pairs with positive exponents.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Mono(Vec<(Sym, u32)>);

impl Mono {
    pub fn one() -> Self {
        Mono(Vec::new())
    }

    pub fn var(s: Sym) -> Self {
        Mono(vec![(s, 1)])
    }

    pub fn pow(s: Sym, e: u32) -> Self {
        if e == 0 {
            Mono::one()
        } else {
            Mono(vec![(s, e)])
        }
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn factors(&self) -> &[(Sym, u32)] {
        &self.0
    }

    pub fn degree_in(&self, s: Sym) -> u32 {
        self.0
            .iter()
            .find(|(t, _)| *t == s)
            .map(|(_, e)| *e)
            .unwrap_or(0)
    }

    pub fn mul(&self, other: &Mono) -> Mono {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            let (a, ea) = self.0[i];
            let (b, eb) = other.0[j];
            match a.cmp(&b) {
                std::cmp::Ordering::Less => {
                    out.push((a, ea));
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push((b, eb));
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push((a, ea + eb));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Mono(out)
    }

    /// `self / other` when `other` divides `self`.
    pub fn div(&self, other: &Mono) -> Option<Mono> {
        let mut out = self.0.clone();
        for &(s, e) in &other.0 {
            let pos = out.iter().position(|(t, _)| *t == s)?;
            if out[pos].1 < e {
                return None;
            }
            out[pos].1 -= e;
            if out[pos].1 == 0 {
                out.remove(pos);
            }
        }
        Some(Mono(out))
    }

    /// Least common multiple.
    pub fn lcm(&self, other: &Mono) -> Mono {
        let mut out: BTreeMap<Sym, u32> = self.0.iter().copied().collect();
        for &(s, e) in &other.0 {
            let slot = out.entry(s).or_insert(0);
            *slot = (*slot).max(e);
        }
        Mono(out.into_iter().collect())
    }

    fn without(&self, s: Sym) -> Mono {
        Mono(self.0.iter().copied().filter(|(t, _)| *t != s).collect())
    }

    fn with_exponent(&self, s: Sym, e: u32) -> Mono {
        let mut m = self.without(s);
        if e > 0 {
            m = m.mul(&Mono::pow(s, e));
        }
        m
    }
}

/// Sparse polynomial with rational coefficients. No zero coefficients are
/// stored. Whether it is in normal form depends on the [`Field`] it is used in.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Poly {
    terms: BTreeMap<Mono, Rational>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn constant(c: Rational) -> Self {
        Poly::term(Mono::one(), c)
    }

    pub fn term(m: Mono, c: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Poly { terms }
    }

    pub fn var(s: Sym) -> Self {
        Poly::term(Mono::var(s), Rational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &Rational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// The constant value, if the polynomial has no symbols.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self.terms.get(&Mono::one()).cloned(),
            _ => None,
        }
    }

    pub fn symbols(&self) -> Vec<Sym> {
        let mut out: Vec<Sym> = self
            .terms
            .keys()
            .flat_map(|m| m.0.iter().map(|(s, _)| *s))
            .collect();
        out.sort();
        out.dedup();
        out
    }

    pub fn mentions(&self, s: Sym) -> bool {
        self.terms.keys().any(|m| m.degree_in(s) > 0)
    }

    fn add_term(&mut self, m: Mono, c: Rational) {
        if c.is_zero() {
            return;
        }
        let mut remove = false;
        match self.terms.get_mut(&m) {
            Some(v) => {
                *v += c;
                remove = v.is_zero();
            }
            None => {
                self.terms.insert(m.clone(), c);
            }
        }
        if remove {
            self.terms.remove(&m);
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn scale(&self, k: &Rational) -> Poly {
        if k.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * k)).collect(),
        }
    }

    pub fn mul_mono(&self, m: &Mono) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(t, c)| (t.mul(m), c.clone())).collect(),
        }
    }

    /// Product without applying relations.
    pub fn mul_raw(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }

    pub fn max_degree_in(&self, s: Sym) -> u32 {
        self.terms.keys().map(|m| m.degree_in(s)).max().unwrap_or(0)
    }

    /// Exact division in the free polynomial ring. Uses a variable in which
    /// the divisor has a constant leading coefficient; returns `None` if no
    /// such variable exists or the remainder is nonzero.
    pub fn div_exact(&self, divisor: &Poly) -> Option<Poly> {
        if divisor.is_zero() {
            return None;
        }
        if let Some(c) = divisor.as_constant() {
            return Some(self.scale(&c.recip()));
        }
        if self.is_zero() {
            return Some(Poly::zero());
        }
        // pick a variable whose top-degree part of `divisor` is a single
        // constant multiple of a pure power
        let var = divisor.symbols().into_iter().rev().find(|&s| {
            let k = divisor.max_degree_in(s);
            let tops: Vec<_> = divisor.terms.iter().filter(|(m, _)| m.degree_in(s) == k).collect();
            tops.len() == 1 && tops[0].0 .0.len() == 1
        })?;
        let k = divisor.max_degree_in(var);
        let lead_c = divisor.terms[&Mono::pow(var, k)].clone();
        let mut rem = self.clone();
        let mut quot = Poly::zero();
        loop {
            let top = rem
                .terms
                .iter()
                .filter(|(m, _)| m.degree_in(var) >= k)
                .max_by_key(|(m, _)| m.degree_in(var))
                .map(|(m, c)| (m.clone(), c.clone()));
            let Some((m, c)) = top else { break };
            let e = m.degree_in(var);
            let qm = m.with_exponent(var, e - k);
            let qc = c / &lead_c;
            let q = Poly::term(qm, qc);
            rem = rem.sub(&q.mul_raw(divisor));
            quot = quot.add(&q);
        }
        if rem.is_zero() {
            Some(quot)
        } else {
            None
        }
    }

    pub fn eval(&self, values: &dyn Fn(Sym) -> f64) -> f64 {
        self.terms
            .iter()
            .map(|(m, c)| {
                let mut v = c.to_f64().unwrap_or(f64::NAN);
                for &(s, e) in &m.0 {
                    v *= values(s).powi(e as i32);
                }
                v
            })
            .sum()
    }
}

/// Symbol table plus relation set. Immutable once built; derived fields keep
/// the symbol indices of their parent.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Field {
    syms: Vec<SymInfo>,
}

/// Incremental construction of a [`Field`].
#[derive(Default)]
pub struct FieldBuilder {
    syms: Vec<SymInfo>,
}

impl FieldBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    fn push(&mut self, name: String, kind: SymKind, nonvanishing: bool, square: Option<Poly>) -> Sym {
        assert!(
            !self.syms.iter().any(|s| s.name == name),
            "duplicate symbol {name}"
        );
        let id = Sym(u16::try_from(self.syms.len()).expect("too many symbols"));
        self.syms.push(SymInfo {
            name,
            kind,
            nonvanishing,
            square,
        });
        id
    }

    pub fn free(&mut self, name: &str) -> Sym {
        self.push(name.to_string(), SymKind::Free, false, None)
    }

    pub fn atom(&mut self, name: &str) -> Sym {
        self.push(name.to_string(), SymKind::Atom, true, None)
    }

    /// `cos(angle)` and `sin(angle)` with `sin^2 = 1 - cos^2`.
    pub fn angle(&mut self, angle: &str, cos_nonvanishing: bool, sin_nonvanishing: bool) -> (Sym, Sym) {
        let c = self.push(format!("cos({angle})"), SymKind::Cos, cos_nonvanishing, None);
        let rel = Poly::constant(Rational::one()).sub(&Poly::term(Mono::pow(c, 2), Rational::one()));
        let s = self.push(format!("sin({angle})"), SymKind::Sin(c), sin_nonvanishing, Some(rel));
        (c, s)
    }

    /// Unit triple; the last member carries the relation.
    pub fn unit_triple(&mut self, a: &str, b: &str, c: &str) -> (Sym, Sym, Sym) {
        let sa = self.push(a.to_string(), SymKind::Triple, false, None);
        let sb = self.push(b.to_string(), SymKind::Triple, false, None);
        let rel = Poly::constant(Rational::one())
            .sub(&Poly::term(Mono::pow(sa, 2), Rational::one()))
            .sub(&Poly::term(Mono::pow(sb, 2), Rational::one()));
        let sc = self.push(c.to_string(), SymKind::Triple, false, Some(rel));
        (sa, sb, sc)
    }

    /// Two free parameters `p, q` and a nonvanishing atom `rho` with
    /// `p^2 + q^2 + rho = 1`; `q` carries the relation.
    pub fn rho_atom(&mut self, p: &str, q: &str, rho: &str) -> (Sym, Sym, Sym) {
        let sp = self.push(p.to_string(), SymKind::Free, false, None);
        let sr = self.push(rho.to_string(), SymKind::Atom, true, None);
        let rel = Poly::constant(Rational::one())
            .sub(&Poly::term(Mono::pow(sp, 2), Rational::one()))
            .sub(&Poly::var(sr));
        let sq = self.push(q.to_string(), SymKind::Free, false, Some(rel));
        (sp, sq, sr)
    }

    pub fn build(self) -> Arc<Field> {
        Arc::new(Field { syms: self.syms })
    }
}

impl Field {
    pub fn empty() -> Arc<Field> {
        Arc::new(Field::default())
    }

    pub fn info(&self, s: Sym) -> &SymInfo {
        &self.syms[s.index()]
    }

    pub fn name(&self, s: Sym) -> &str {
        &self.syms[s.index()].name
    }

    pub fn symbols(&self) -> impl Iterator<Item = (Sym, &SymInfo)> {
        self.syms.iter().enumerate().map(|(i, info)| (Sym(i as u16), info))
    }

    pub fn lookup(&self, name: &str) -> Option<Sym> {
        self.symbols()
            .find(|(_, info)| info.name == name && info.kind != SymKind::Eliminated)
            .map(|(s, _)| s)
    }

    /// A symbol is invertible if flagged nonvanishing or if its square is a
    /// nonzero constant.
    pub fn is_unit_sym(&self, s: Sym) -> bool {
        let info = self.info(s);
        info.nonvanishing
            || info
                .square
                .as_ref()
                .and_then(|p| p.as_constant())
                .is_some_and(|c| !c.is_zero())
    }

    fn normal_mono(&self, m: &Mono, c: &Rational) -> Poly {
        let mut base = Mono::one();
        let mut reductions: Vec<(&Poly, u32)> = Vec::new();
        for &(s, e) in &m.0 {
            match &self.info(s).square {
                Some(r) if e >= 2 => {
                    base = base.mul(&Mono::pow(s, e % 2));
                    reductions.push((r, e / 2));
                }
                _ => base = base.mul(&Mono::pow(s, e)),
            }
        }
        let mut out = Poly::term(base, c.clone());
        for (r, k) in reductions {
            for _ in 0..k {
                out = self.mul(&out, r);
            }
        }
        out
    }

    pub fn normalize(&self, p: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &p.terms {
            out = out.add(&self.normal_mono(m, c));
        }
        out
    }

    pub fn is_normal(&self, p: &Poly) -> bool {
        p.terms.keys().all(|m| {
            m.0.iter()
                .all(|&(s, e)| e < 2 || self.info(s).square.is_none())
        })
    }

    /// Product of two normal forms, in normal form.
    pub fn mul(&self, a: &Poly, b: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (ma, ca) in &a.terms {
            for (mb, cb) in &b.terms {
                let m = ma.mul(mb);
                let c = ca * cb;
                if self.is_normal_mono(&m) {
                    out.add_term(m, c);
                } else {
                    out = out.add(&self.normal_mono(&m, &c));
                }
            }
        }
        out
    }

    fn is_normal_mono(&self, m: &Mono) -> bool {
        m.0.iter().all(|&(s, e)| e < 2 || self.info(s).square.is_none())
    }

    pub fn pow(&self, p: &Poly, e: u32) -> Poly {
        let mut out = Poly::constant(Rational::one());
        for _ in 0..e {
            out = self.mul(&out, p);
        }
        out
    }

    /// `p / s` in the quotient ring, if it exists.
    fn div_sym(&self, p: &Poly, s: Sym) -> Option<Poly> {
        match &self.info(s).square {
            None => {
                if p.terms.keys().all(|m| m.degree_in(s) >= 1) {
                    Some(Poly {
                        terms: p
                            .terms
                            .iter()
                            .map(|(m, c)| (m.div(&Mono::var(s)).unwrap(), c.clone()))
                            .collect(),
                    })
                } else {
                    None
                }
            }
            Some(r) => {
                // p = rest + s * q with rest free of s
                let mut rest = Poly::zero();
                let mut q = Poly::zero();
                for (m, c) in &p.terms {
                    if m.degree_in(s) >= 1 {
                        q.add_term(m.div(&Mono::var(s)).unwrap(), c.clone());
                    } else {
                        rest.add_term(m.clone(), c.clone());
                    }
                }
                if rest.is_zero() {
                    return Some(q);
                }
                // rest / s = rest * s / r
                let t = rest.div_exact(r)?;
                Some(q.add(&self.mul(&t, &Poly::var(s))))
            }
        }
    }

    /// Writes `p = k * m` (modulo relations) with `m` a monomial in
    /// invertible symbols.
    pub fn unit_decomposition(&self, p: &Poly) -> Option<(Rational, Mono)> {
        if p.is_zero() {
            return None;
        }
        let mut rest = p.clone();
        let mut mono = Mono::one();
        for (s, info) in self.symbols() {
            let Some(r) = &info.square else { continue };
            if !self.is_unit_sym(s) || r.as_constant().is_some() {
                continue;
            }
            while rest.as_constant().is_none() {
                match rest.div_exact(r) {
                    Some(q) => {
                        rest = q;
                        mono = mono.mul(&Mono::pow(s, 2));
                    }
                    None => break,
                }
            }
        }
        if rest.len() != 1 {
            return None;
        }
        let (m, c) = rest.terms.iter().next().unwrap();
        if m.0.iter().all(|&(s, _)| self.is_unit_sym(s)) {
            Some((c.clone(), mono.mul(m)))
        } else {
            None
        }
    }

    pub fn is_unit_poly(&self, p: &Poly) -> bool {
        self.unit_decomposition(p).is_some()
    }

    pub fn display_poly(&self, p: &Poly) -> String {
        if p.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (m, c)) in p.terms.iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mono = self.display_mono(m);
            if m.is_one() {
                out.push_str(&fmt_rational(&abs));
            } else if abs.is_one() {
                out.push_str(&mono);
            } else {
                out.push_str(&fmt_rational(&abs));
                out.push('*');
                out.push_str(&mono);
            }
        }
        out
    }

    pub fn display_mono(&self, m: &Mono) -> String {
        if m.is_one() {
            return "1".to_string();
        }
        m.0.iter()
            .map(|&(s, e)| {
                if e == 1 {
                    self.name(s).to_string()
                } else {
                    format!("{}^{}", self.name(s), e)
                }
            })
            .collect::<Vec<_>>()
            .join("*")
    }

    /// Copy of the field with `s` flagged nonvanishing.
    pub fn assume_nonzero(&self, s: Sym) -> Arc<Field> {
        let mut f = self.clone();
        f.syms[s.index()].nonvanishing = true;
        Arc::new(f)
    }

    /// Copy of the field with a fresh nonvanishing atom appended.
    pub fn with_atom(&self, name: &str) -> (Arc<Field>, Sym) {
        let mut b = FieldBuilder { syms: self.syms.clone() };
        let s = b.atom(name);
        (b.build(), s)
    }

    /// Substitutes `sym -> value` and propagates the consequences to the
    /// relation set. `value` must live in (a field with the same symbols as)
    /// `self` and must not mention `sym`.
    pub fn substitute(self: &Arc<Field>, sym: Sym, value: &Scalar) -> Result<Substitution, ScalarError> {
        let mut field: Field = (**self).clone();
        let mut map: BTreeMap<Sym, Scalar> = BTreeMap::new();
        let mut pending = vec![(sym, value.clone())];
        let mut guard = 0;
        while let Some((s, v)) = pending.pop() {
            guard += 1;
            if guard > 64 {
                return Err(ScalarError::Unsupported("substitution cascade too long".into()));
            }
            let info = field.syms[s.index()].clone();
            if info.kind == SymKind::Eliminated {
                continue;
            }
            if v.num.mentions(s) || v.den.degree_in(s) > 0 {
                return Err(ScalarError::Unsupported(format!(
                    "value for {} mentions the symbol itself",
                    info.name
                )));
            }
            if info.nonvanishing && !v.is_unit() {
                return Err(ScalarError::ZeroesDenominator {
                    sym: info.name.clone(),
                    value: v.to_string(),
                });
            }
            // compose earlier values with this one
            let composed: Vec<(Sym, Scalar)> = map
                .iter()
                .map(|(k, old)| Ok((*k, old.substitute_raw(&field, s, &v)?)))
                .collect::<Result<_, ScalarError>>()?;
            map.extend(composed);
            let mut v_poly_den_free = None;
            if v.den.is_one() {
                v_poly_den_free = Some(v.num.clone());
            }
            if let Some(r) = &info.square {
                // induced relation: v^2 = r
                let vp = v_poly_den_free.clone().ok_or_else(|| {
                    ScalarError::Unsupported(format!("non-polynomial value for {}", info.name))
                })?;
                let q = field.normalize(&r.sub(&field.mul(&vp, &vp)));
                field.syms[s.index()].square = None;
                field.syms[s.index()].kind = SymKind::Eliminated;
                if let Some(c) = q.as_constant() {
                    if !c.is_zero() {
                        return Err(ScalarError::Contradiction(format!(
                            "{}^2 = {} forces {} = 0",
                            info.name,
                            field.display_poly(r),
                            fmt_rational(&c)
                        )));
                    }
                } else {
                    let (lead, rel) = pick_lead(&field, &q).ok_or_else(|| {
                        ScalarError::Unsupported(format!(
                            "cannot orient induced relation {} = 0",
                            field.display_poly(&q)
                        ))
                    })?;
                    if rel.is_zero() {
                        let zero = Scalar::zero(&Arc::new(field.clone()));
                        pending.push((lead, zero));
                    } else {
                        field.syms[lead.index()].square = Some(rel);
                        renormalize_relations(&mut field);
                    }
                }
            } else {
                field.syms[s.index()].kind = SymKind::Eliminated;
                let vp = v_poly_den_free.clone();
                for i in 0..field.syms.len() {
                    let Some(r) = field.syms[i].square.clone() else { continue };
                    if !r.mentions(s) {
                        continue;
                    }
                    let vp = vp.clone().ok_or_else(|| {
                        ScalarError::Unsupported(format!(
                            "non-polynomial value for {} inside a relation",
                            info.name
                        ))
                    })?;
                    let r2 = subst_poly(&field, &r, s, &vp);
                    if let Some(c) = r2.as_constant() {
                        if c.is_zero() {
                            field.syms[i].square = Some(Poly::zero());
                            let zero = Scalar::zero(&Arc::new(field.clone()));
                            pending.push((Sym(i as u16), zero));
                            continue;
                        }
                        if c.is_negative() {
                            return Err(ScalarError::Contradiction(format!(
                                "{}^2 = {}",
                                field.syms[i].name,
                                fmt_rational(&c)
                            )));
                        }
                    }
                    field.syms[i].square = Some(r2);
                }
                renormalize_relations(&mut field);
            }
            map.insert(s, v);
        }
        let to = Arc::new(field);
        let map = map
            .into_iter()
            .map(|(k, v)| (k, v.rebase(&to)))
            .collect();
        Ok(Substitution {
            from: self.clone(),
            to,
            map,
        })
    }
}

fn renormalize_relations(field: &mut Field) {
    for i in 0..field.syms.len() {
        if let Some(r) = field.syms[i].square.clone() {
            let n = field.normalize(&r);
            field.syms[i].square = Some(n);
        }
    }
}

/// Orients `q = 0` as `u^2 = rel`, choosing the last symbol that occurs only
/// as a pure square with constant coefficient.
fn pick_lead(field: &Field, q: &Poly) -> Option<(Sym, Poly)> {
    for s in q.symbols().into_iter().rev() {
        if field.info(s).square.is_some() {
            continue;
        }
        let mut coeff = None;
        let mut ok = true;
        let mut rest = Poly::zero();
        for (m, c) in q.terms() {
            let d = m.degree_in(s);
            if d == 0 {
                rest.add_term(m.clone(), c.clone());
            } else if d == 2 && m.0.len() == 1 && coeff.is_none() {
                coeff = Some(c.clone());
            } else {
                ok = false;
                break;
            }
        }
        if !ok {
            continue;
        }
        if let Some(k) = coeff {
            return Some((s, rest.scale(&(-k.recip()))));
        }
    }
    None
}

fn subst_poly(field: &Field, p: &Poly, s: Sym, v: &Poly) -> Poly {
    let mut out = Poly::zero();
    for (m, c) in p.terms() {
        let e = m.degree_in(s);
        let base = Poly::term(m.without(s), c.clone());
        let t = if e == 0 {
            base
        } else {
            field.mul(&base, &field.pow(v, e))
        };
        out = out.add(&t);
    }
    field.normalize(&out)
}

pub fn fmt_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Result of [`Field::substitute`]: maps scalars of `from` into `to`.
#[derive(Clone, Debug)]
pub struct Substitution {
    pub from: Arc<Field>,
    pub to: Arc<Field>,
    pub map: BTreeMap<Sym, Scalar>,
}

impl Substitution {
    pub fn apply(&self, x: &Scalar) -> Result<Scalar, ScalarError> {
        let f = &self.to;
        let image = |s: Sym| match self.map.get(&s) {
            Some(v) => v.clone(),
            None => Scalar::from_poly(f, Poly::var(s)),
        };
        let mut num = Scalar::zero(f);
        for (m, c) in x.num.terms() {
            let mut t = Scalar::rational(f, c.clone());
            for &(s, e) in m.factors() {
                t = &t * &image(s).pow(e);
            }
            num = &num + &t;
        }
        let mut den = Scalar::one(f);
        for &(s, e) in x.den.factors() {
            den = &den * &image(s).pow(e);
        }
        num.checked_div(&den).map_err(|_| ScalarError::ZeroesDenominator {
            sym: x.field.display_mono(&x.den),
            value: den.to_string(),
        })
    }
}
/// Element of the coefficient field.
#[derive(Clone, Debug)]
pub struct Scalar {
    field: Arc<Field>,
    num: Poly,
    den: Mono,
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        (self - other).is_zero()
    }
}

impl Scalar {
    pub fn zero(field: &Arc<Field>) -> Scalar {
        Scalar {
            field: field.clone(),
            num: Poly::zero(),
            den: Mono::one(),
        }
    }

    pub fn one(field: &Arc<Field>) -> Scalar {
        Scalar::int(field, 1)
    }

    pub fn int(field: &Arc<Field>, n: i64) -> Scalar {
        Scalar::rational(field, Rational::from_integer(BigInt::from(n)))
    }

    pub fn frac(field: &Arc<Field>, n: i64, d: i64) -> Scalar {
        Scalar::rational(field, Rational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn rational(field: &Arc<Field>, r: Rational) -> Scalar {
        Scalar {
            field: field.clone(),
            num: Poly::constant(r),
            den: Mono::one(),
        }
    }

    pub fn sym(field: &Arc<Field>, s: Sym) -> Scalar {
        Scalar::from_poly(field, Poly::var(s))
    }

    /// Wraps a polynomial, normalizing it.
    pub fn from_poly(field: &Arc<Field>, p: Poly) -> Scalar {
        Scalar {
            num: field.normalize(&p),
            field: field.clone(),
            den: Mono::one(),
        }
    }

    /// Builds `num / den`; `den` must consist of invertible symbols.
    pub fn fraction(field: &Arc<Field>, num: Poly, den: Mono) -> Result<Scalar, ScalarError> {
        if !den.factors().iter().all(|&(s, _)| field.is_unit_sym(s)) {
            return Err(ScalarError::NotAUnit(field.display_mono(&den)));
        }
        Ok(Scalar::canonical(field.clone(), field.normalize(&num), den))
    }

    fn canonical(field: Arc<Field>, mut num: Poly, den: Mono) -> Scalar {
        if num.is_zero() {
            return Scalar {
                field,
                num,
                den: Mono::one(),
            };
        }
        let mut kept = Vec::new();
        for &(s, e) in den.factors() {
            let mut left = e;
            while left > 0 {
                match field.div_sym(&num, s) {
                    Some(q) => {
                        num = q;
                        left -= 1;
                    }
                    None => break,
                }
            }
            if left > 0 {
                kept.push((s, left));
            }
        }
        Scalar {
            field,
            num,
            den: Mono(kept),
        }
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator(&self) -> &Mono {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.den.is_one() && self.num.as_constant().is_some_and(|c| c.is_one())
    }

    /// The rational value if the scalar is a constant.
    pub fn as_rational(&self) -> Option<Rational> {
        if self.den.is_one() {
            self.num.as_constant()
        } else {
            None
        }
    }

    pub fn is_constant(&self) -> bool {
        self.as_rational().is_some()
    }

    /// Provably invertible under the field's assumptions.
    pub fn is_unit(&self) -> bool {
        self.field.is_unit_poly(&self.num)
    }

    pub fn symbols(&self) -> Vec<Sym> {
        let mut s = self.num.symbols();
        s.extend(self.den.factors().iter().map(|(t, _)| *t));
        s.sort();
        s.dedup();
        s
    }

    fn check_field(&self, other: &Scalar) {
        assert!(
            Arc::ptr_eq(&self.field, &other.field) || *self.field == *other.field,
            "scalars from different fields"
        );
    }

    pub fn checked_div(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        self.check_field(other);
        let (k, m) = self
            .field
            .unit_decomposition(&other.num)
            .ok_or_else(|| ScalarError::NotAUnit(other.to_string()))?;
        let num = self
            .field
            .mul(&self.num, &self.field.normalize(&Poly::term(other.den.clone(), k.recip())));
        Ok(Scalar::canonical(self.field.clone(), num, self.den.mul(&m)))
    }

    pub fn recip(&self) -> Result<Scalar, ScalarError> {
        Scalar::one(&self.field).checked_div(self)
    }

    pub fn pow(&self, e: u32) -> Scalar {
        let mut out = Scalar::one(&self.field);
        for _ in 0..e {
            out = &out * self;
        }
        out
    }

    pub fn scale(&self, k: &Rational) -> Scalar {
        Scalar {
            field: self.field.clone(),
            num: self.num.scale(k),
            den: if k.is_zero() { Mono::one() } else { self.den.clone() },
        }
    }

    /// Moves the scalar into a field with the same symbol indices.
    pub fn rebase(&self, field: &Arc<Field>) -> Scalar {
        if Arc::ptr_eq(&self.field, field) {
            return self.clone();
        }
        Scalar::canonical(field.clone(), field.normalize(&self.num), self.den.clone())
    }

    /// Convenience wrapper around [`Field::substitute`] for a single scalar.
    pub fn substitute(&self, s: Sym, v: &Scalar) -> Result<Scalar, ScalarError> {
        let sub = self.field.substitute(s, v)?;
        sub.apply(self)
    }

    /// Plain substitution inside the same field (no relation bookkeeping).
    fn substitute_raw(&self, field: &Field, s: Sym, v: &Scalar) -> Result<Scalar, ScalarError> {
        if !self.symbols().contains(&s) {
            return Ok(self.clone());
        }
        let f = Arc::new(field.clone());
        let mut map = BTreeMap::new();
        map.insert(s, v.rebase(&f));
        Substitution {
            from: f.clone(),
            to: f,
            map,
        }
        .apply(&self.rebase(&Arc::new(field.clone())))
    }

    pub fn eval(&self, values: &dyn Fn(Sym) -> f64) -> f64 {
        let n = self.num.eval(values);
        let d = Poly::term(self.den.clone(), Rational::one()).eval(values);
        n / d
    }

    /// Strips a unit factor, returning `(unit, rest)` with `self = unit * rest`
    /// and `rest` having a primitive leading coefficient of one.
    pub fn split_unit(&self) -> (Scalar, Scalar) {
        if self.is_zero() {
            return (Scalar::one(&self.field), self.clone());
        }
        if let Some((k, m)) = self.field.unit_decomposition(&self.num) {
            let unit = Scalar::canonical(
                self.field.clone(),
                self.field.normalize(&Poly::term(m, k)),
                self.den.clone(),
            );
            return (unit, Scalar::one(&self.field));
        }
        let lead = self.num.terms.iter().next_back().map(|(_, c)| c.clone()).unwrap();
        let unit = Scalar::canonical(self.field.clone(), Poly::constant(lead.clone()), self.den.clone());
        let rest = Scalar {
            field: self.field.clone(),
            num: self.num.scale(&lead.recip()),
            den: Mono::one(),
        };
        (unit, rest)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let num = self.field.display_poly(&self.num);
        if self.den.is_one() {
            write!(f, "{num}")
        } else {
            let den = self.field.display_mono(&self.den);
            if self.num.len() == 1 && !num.starts_with('-') {
                write!(f, "{num}/({den})")
            } else {
                write!(f, "({num})/({den})")
            }
        }
    }
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, rhs: &'a Scalar) -> Scalar {
        self.check_field(rhs);
        if rhs.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return rhs.clone();
        }
        if self.den == rhs.den {
            return Scalar::canonical(self.field.clone(), self.num.add(&rhs.num), self.den.clone());
        }
        let l = self.den.lcm(&rhs.den);
        let fa = Poly::term(l.div(&self.den).unwrap(), Rational::one());
        let fb = Poly::term(l.div(&rhs.den).unwrap(), Rational::one());
        let f = &self.field;
        let num = f
            .mul(&self.num, &f.normalize(&fa))
            .add(&f.mul(&rhs.num, &f.normalize(&fb)));
        Scalar::canonical(self.field.clone(), num, l)
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &'a Scalar) -> Scalar {
        self + &(-rhs)
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar {
            field: self.field.clone(),
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &'a Scalar) -> Scalar {
        self.check_field(rhs);
        if self.is_zero() || rhs.is_zero() {
            return Scalar::zero(&self.field);
        }
        let num = self.field.mul(&self.num, &rhs.num);
        Scalar::canonical(self.field.clone(), num, self.den.mul(&rhs.den))
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(self, rhs: Scalar) -> Scalar {
        &self + &rhs
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(self, rhs: Scalar) -> Scalar {
        &self - &rhs
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: Scalar) -> Scalar {
        &self * &rhs
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn angle_field() -> (Arc<Field>, Sym, Sym) {
        let mut b = FieldBuilder::new();
        let (c, s) = b.angle("t", true, true);
        (b.build(), c, s)
    }

    #[test]
    fn sine_square_rewrites() {
        let (f, c, s) = angle_field();
        let s2 = Scalar::sym(&f, s).pow(2);
        let expected = &Scalar::one(&f) - &Scalar::sym(&f, c).pow(2);
        assert_eq!(s2.numerator(), expected.numerator());
        let s3 = Scalar::sym(&f, s).pow(3);
        let expected3 = &Scalar::sym(&f, s) - &(&Scalar::sym(&f, s) * &Scalar::sym(&f, c).pow(2));
        assert_eq!(s3.numerator(), expected3.numerator());
    }

    #[test]
    fn pythagorean_sum_is_one() {
        let (f, c, s) = angle_field();
        let sum = &Scalar::sym(&f, c).pow(2) + &Scalar::sym(&f, s).pow(2);
        assert!(sum.is_one());
    }

    #[test]
    fn triple_lead_rewrites() {
        let mut b = FieldBuilder::new();
        let (a, bb, c) = b.unit_triple("a", "b", "c");
        let f = b.build();
        let c2 = Scalar::sym(&f, c).pow(2);
        let expected = &(&Scalar::one(&f) - &Scalar::sym(&f, a).pow(2)) - &Scalar::sym(&f, bb).pow(2);
        assert_eq!(c2.numerator(), expected.numerator());
    }

    #[test]
    fn reciprocal_of_nonvanishing_cos() {
        let (f, c, _) = angle_field();
        let sec = Scalar::sym(&f, c).recip().unwrap();
        assert_eq!(sec.denominator(), &Mono::var(c));
        assert!((&sec * &Scalar::sym(&f, c)).is_one());
    }

    #[test]
    fn division_by_free_symbol_rejected() {
        let mut b = FieldBuilder::new();
        let t = b.free("t1");
        let f = b.build();
        let err = Scalar::one(&f).checked_div(&Scalar::sym(&f, t)).unwrap_err();
        assert!(matches!(err, ScalarError::NotAUnit(_)));
    }

    #[test]
    fn sine_squared_is_a_unit() {
        let (f, c, s) = angle_field();
        let one_minus_c2 = &Scalar::one(&f) - &Scalar::sym(&f, c).pow(2);
        assert!(one_minus_c2.is_unit());
        let q = Scalar::one(&f).checked_div(&one_minus_c2).unwrap();
        assert!((&q * &Scalar::sym(&f, s).pow(2)).is_one());
    }

    #[test]
    fn cancellation_through_relation() {
        let (f, c, s) = angle_field();
        // (1 - c^2) / s = s
        let x = (&Scalar::one(&f) - &Scalar::sym(&f, c).pow(2))
            .checked_div(&Scalar::sym(&f, s))
            .unwrap();
        assert!(x.denominator().is_one());
        assert_eq!(x.to_string(), "sin(t)");
    }

    #[test]
    fn substitute_free_value() {
        let mut b = FieldBuilder::new();
        let t = b.free("t1");
        let f = b.build();
        let th = Scalar::sym(&f, t);
        let expr = &th * &(&th.scale(&Rational::from_integer(2.into())) - &Scalar::one(&f));
        let r = expr.substitute(t, &Scalar::frac(&f, -1, 2)).unwrap();
        assert!(r.is_one());
    }

    #[test]
    fn substitute_triple_lead_reorients_relation() {
        let mut b = FieldBuilder::new();
        let (a, bb, c) = b.unit_triple("a", "b", "c");
        let f = b.build();
        let sub = f.substitute(c, &Scalar::zero(&f)).unwrap();
        let b2 = sub.apply(&Scalar::sym(&f, bb).pow(2)).unwrap();
        let expected = &Scalar::one(&sub.to) - &Scalar::sym(&sub.to, a).pow(2);
        assert_eq!(b2, expected);
        assert!(sub.to.info(bb).square.is_some());
    }

    #[test]
    fn substitute_zero_into_denominator_rejected() {
        let (f, _, s) = angle_field();
        let x = Scalar::sym(&f, s).recip().unwrap();
        let err = x.substitute(s, &Scalar::zero(&f)).unwrap_err();
        assert!(matches!(err, ScalarError::ZeroesDenominator { .. }));
    }

    #[test]
    fn square_one_symbol_is_unit() {
        let mut b = FieldBuilder::new();
        let (a, bb, c) = b.unit_triple("a", "b", "c");
        let f = b.build();
        let sub = f.substitute(bb, &Scalar::zero(&f)).unwrap();
        let sub2 = sub.to.substitute(c, &Scalar::zero(&sub.to)).unwrap();
        assert!(sub2.to.is_unit_sym(a));
    }

    #[test]
    fn rho_relation() {
        let mut b = FieldBuilder::new();
        let (p, q, rho) = b.rho_atom("t1", "t2", "rho");
        let f = b.build();
        let sum = &(&Scalar::sym(&f, p).pow(2) + &Scalar::sym(&f, q).pow(2)) + &Scalar::sym(&f, rho);
        assert!(sum.is_one());
        assert!(Scalar::sym(&f, rho).is_unit());
    }
}
