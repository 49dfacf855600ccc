//! Almost contact structures induced on a hypersurface of a nearly Kaehler
//! six-manifold of type one, their covariant derivatives, and the defining
//! equations of the Sasakian, co-Kaehler, nearly Sasakian and nearly
//! cosymplectic classes.
//!
//! Frame coordinates are `{zeta, phi1 zeta, phi2 zeta, phi3 zeta, xi, N}`
//! realised in the canonical point model as `{f2, Jf2, Jf3, f3, -Jf1, f1}`.


mod script;

pub use script::{
    golden_script, parse_script, run_case, theorem_b_checksum, theorem_b_report, verify_theorem_b, BranchOutcome,
    CaseReport, Expectation, LeafReport, RelationCheck, Script, ScriptCase, ScriptError, StepReport, THEOREM_B_SRC,
};

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::Serialize;

use crate::curvature::ShapeOp;
use crate::linform::{eliminate, CoefFn, EqSystem, LinForm, Solution, Unknown};
use crate::pointmodel::generate_omega;
use crate::report::{Item, Report, Residual};
use crate::scalar::{Field, FieldBuilder, Scalar, Substitution, Sym};
use crate::tensor::{LinVec, Matrix, Metric, Vector, DIM};

pub const AC_LABELS: [&str; DIM] = ["zeta", "phi1zeta", "phi2zeta", "phi3zeta", "xi", "N"];
pub const XI: usize = 4;
pub const NORMAL: usize = 5;

/// Model index and sign of each frame vector.
const FRAME_IN_MODEL: [(i64, usize); DIM] = [(1, 2), (1, 3), (1, 5), (1, 4), (-1, 1), (1, 0)];

/// The four classes of Definition-style defining equations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AcKind {
    Sasakian,
    CoKahler,
    NearlySasakian,
    NearlyCosymplectic,
}

impl AcKind {
    pub const ALL: [AcKind; 4] = [
        AcKind::Sasakian,
        AcKind::CoKahler,
        AcKind::NearlySasakian,
        AcKind::NearlyCosymplectic,
    ];

    pub fn id(self) -> &'static str {
        match self {
            AcKind::Sasakian => "sasakian",
            AcKind::CoKahler => "co-kahler",
            AcKind::NearlySasakian => "nearly-sasakian",
            AcKind::NearlyCosymplectic => "nearly-cosymplectic",
        }
    }
}

impl fmt::Display for AcKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for AcKind {
    type Err = String;
    fn from_str(s: &str) -> Result<AcKind, String> {
        AcKind::ALL
            .into_iter()
            .find(|k| k.id() == s)
            .ok_or_else(|| format!("unknown structure class {s:?}"))
    }
}

/// The induced structures `phi_1, phi_2, phi_3` on the adapted frame, with
/// `phi = a phi_1 + b phi_2 + c phi_3` over a unit triple `a, b, c`.
#[derive(Clone, Debug)]
pub struct ACFrame {
    pub field: Arc<Field>,
    pub coef: [Sym; 3],
    pub metric: Metric,
    pub j: Matrix,
    pub phi: [Matrix; 3],
    pub shape: ShapeOp,
    g_table: Vec<Vec<Vector>>,
}

fn to_frame(field: &Arc<Field>, model: &[i64; DIM]) -> Vector {
    let mut v = Vector::zero(field);
    for (k, &(s, m)) in FRAME_IN_MODEL.iter().enumerate() {
        v.0[k] = Scalar::int(field, s * model[m]);
    }
    v
}

/// Builds the adapted frame at a point of the canonical model.
pub fn build_ac_frame() -> ACFrame {
    let mut b = FieldBuilder::new();
    let (sa, sb, sc) = b.unit_triple("a", "b", "c");
    let field = b.build();
    let omega = generate_omega().expect("structure tensor is consistent");
    let model_j = |m: usize| -> [i64; DIM] {
        let mut out = [0; DIM];
        if m.is_multiple_of(2) {
            out[m + 1] = 1;
        } else {
            out[m - 1] = -1;
        }
        out
    };
    let j = Matrix::from_images(
        FRAME_IN_MODEL
            .iter()
            .map(|&(s, m)| to_frame(&field, &model_j(m).map(|x| s * x)))
            .collect(),
    );
    let g_table: Vec<Vec<Vector>> = FRAME_IN_MODEL
        .iter()
        .map(|&(s1, m1)| {
            FRAME_IN_MODEL
                .iter()
                .map(|&(s2, m2)| {
                    let img: [i64; DIM] = std::array::from_fn(|n| s1 * s2 * omega[m1][m2][n] as i64);
                    to_frame(&field, &img)
                })
                .collect()
        })
        .collect();
    let e = |i| Vector::basis(&field, i);
    let tangent_cols = |f: &dyn Fn(usize) -> Vector| {
        Matrix::from_images((0..DIM).map(|k| if k == NORMAL { Vector::zero(&field) } else { f(k) }).collect())
    };
    let phi1 = tangent_cols(&|k| j.apply(&e(k)).sub(&e(NORMAL).scale(&Scalar::int(&field, if k == XI { 1 } else { 0 }))));
    let phi2 = tangent_cols(&|k| g_table[XI][k].clone());
    let phi3 = tangent_cols(&|k| g_table[NORMAL][k].clone());
    let metric = Metric::identity(&field);
    ACFrame {
        shape: ShapeOp::new(&metric),
        metric,
        j,
        phi: [phi1, phi2, phi3],
        coef: [sa, sb, sc],
        g_table,
        field,
    }
}

impl ACFrame {
    pub fn e(&self, i: usize) -> Vector {
        Vector::basis(&self.field, i)
    }

    pub fn index(&self, label: &str) -> Option<usize> {
        AC_LABELS[..NORMAL].iter().position(|l| *l == label)
    }

    pub fn xi(&self) -> Vector {
        self.e(XI)
    }

    pub fn normal(&self) -> Vector {
        self.e(NORMAL)
    }

    pub fn coef_scalar(&self, i: usize) -> Scalar {
        Scalar::sym(&self.field, self.coef[i])
    }

    pub fn eta(&self, x: &Vector) -> Scalar {
        x.0[XI].clone()
    }

    pub fn g(&self, x: &Vector, y: &Vector) -> Scalar {
        self.metric.g(x, y)
    }

    /// `G(X, Y)` by bilinear extension.
    pub fn gt(&self, x: &Vector, y: &Vector) -> Vector {
        let mut out = Vector::zero(&self.field);
        for i in 0..DIM {
            if x.0[i].is_zero() {
                continue;
            }
            for k in 0..DIM {
                if !y.0[k].is_zero() {
                    out = out.add(&self.g_table[i][k].scale(&(&x.0[i] * &y.0[k])));
                }
            }
        }
        out
    }

    /// `G(X, Y)` with `X` a vector of forms.
    pub fn gt_lin(&self, x: &LinVec, y: &Vector) -> LinVec {
        (0..DIM).fold(LinVec::zero(&self.field), |acc, i| {
            if x.0[i].is_zero() {
                acc
            } else {
                acc.add(&LinVec::outer(&x.0[i], &self.gt(&self.e(i), y)))
            }
        })
    }

    /// `omega_i(X, Y) = g(phi_i X, Y)`.
    pub fn omega(&self, i: usize, x: &Vector, y: &Vector) -> Scalar {
        self.g(&self.phi[i - 1].apply(x), y)
    }

    pub fn omega_lin(&self, i: usize, x: &LinVec, y: &Vector) -> LinForm {
        LinVec::apply(&self.phi[i - 1], x).pair(&self.metric, y)
    }

    /// `(nabla_X phi_i) Y` from the closed formulas; the last component is
    /// the normal part.
    pub fn covariant_phi(&self, i: usize, x: &Vector, y: &Vector) -> LinVec {
        let n = self.normal();
        let xi = self.xi();
        let sx = self.shape.apply(x);
        let c = |s: Scalar| LinForm::constant(s);
        match i {
            1 => LinVec::from_vector(&self.gt(x, y))
                .sub(&LinVec::outer(&c(self.omega(3, x, y)), &n))
                .add(&sx.scale(&self.eta(y)))
                .sub(&LinVec::outer(&self.shape.pairing(x, y), &xi)),
            2 => {
                let phi1 = &self.phi[0];
                LinVec::from_vector(&phi1.apply(x).scale(&self.eta(y)))
                    .sub(&LinVec::from_vector(&phi1.apply(y).scale(&self.eta(x))))
                    .sub(&LinVec::outer(&c(self.omega(1, x, y)), &xi))
                    .add(&LinVec::outer(&self.omega_lin(2, &sx, y), &n))
                    .add(&self.gt_lin(&LinVec::apply(phi1, &sx), y))
                    .add(&LinVec::outer(&self.shape.pairing(x, &xi), &self.phi[2].apply(y)))
            }
            3 => LinVec::from_vector(&x.scale(&self.eta(y)))
                .sub(&LinVec::from_vector(&xi.scale(&self.g(x, y))))
                .sub(&self.gt_lin(&sx, y))
                .add(&LinVec::outer(&self.omega_lin(3, &sx, y), &n)),
            _ => panic!("structure index {i} out of range"),
        }
    }

    /// `(nabla_X phi) Y` for `phi = a phi_1 + b phi_2 + c phi_3`, with the
    /// derivatives of `a, b, c` along `X` as formal unknowns.
    pub fn nabla_phi(&self, x: &Vector, y: &Vector) -> LinVec {
        let mut out = LinVec::zero(&self.field);
        for (idx, fun) in CoefFn::ALL.into_iter().enumerate() {
            let mut dx = LinForm::zero(&self.field);
            for k in 0..NORMAL {
                if !x.0[k].is_zero() {
                    dx = dx.add(&LinForm::term(Unknown::deriv(k + 1, fun), x.0[k].clone()));
                }
            }
            out = out
                .add(&LinVec::outer(&dx, &self.phi[idx].apply(y)))
                .add(&self.covariant_phi(idx + 1, x, y).scale(&self.coef_scalar(idx)));
        }
        out
    }

    /// `g(LHS - RHS, Z)` of the defining equation of `kind`.
    pub fn defining_equation(&self, kind: AcKind, x: &Vector, y: &Vector, z: &Vector) -> LinForm {
        let xi = self.xi();
        let lhs = match kind {
            AcKind::Sasakian | AcKind::CoKahler => self.nabla_phi(x, y),
            AcKind::NearlySasakian | AcKind::NearlyCosymplectic => self.nabla_phi(x, y).add(&self.nabla_phi(y, x)),
        };
        let rhs = match kind {
            AcKind::Sasakian => x.scale(&self.eta(y)).sub(&xi.scale(&self.g(x, y))),
            AcKind::NearlySasakian => x
                .scale(&self.eta(y))
                .add(&y.scale(&self.eta(x)))
                .sub(&xi.scale(&(&Scalar::int(&self.field, 2) * &self.g(x, y)))),
            AcKind::CoKahler | AcKind::NearlyCosymplectic => Vector::zero(&self.field),
        };
        lhs.sub(&LinVec::from_vector(&rhs)).pair(&self.metric, z)
    }

    /// `a D_k(a) + b D_k(b) + c D_k(c)` for each direction `k`: the
    /// derivative of the unit-triple relation.
    pub fn triple_derivative_relations(&self) -> Vec<LinForm> {
        (1..=NORMAL)
            .map(|k| {
                CoefFn::ALL
                    .into_iter()
                    .enumerate()
                    .fold(LinForm::zero(&self.field), |acc, (i, fun)| {
                        acc.add(&LinForm::term(Unknown::deriv(k, fun), self.coef_scalar(i)))
                    })
            })
            .collect()
    }

    /// `g(phi_1 S X, Y) + g(phi_1 S Y, X)` over all frame pairs.
    pub fn kcontact_equations(&self) -> Vec<LinForm> {
        let mut out = Vec::new();
        for i in 0..NORMAL {
            for k in i..NORMAL {
                let (x, y) = (self.e(i), self.e(k));
                let a = LinVec::apply(&self.phi[0], &self.shape.apply(&x)).pair(&self.metric, &y);
                let b = LinVec::apply(&self.phi[0], &self.shape.apply(&y)).pair(&self.metric, &x);
                let eq = a.add(&b);
                if !eq.is_zero() {
                    out.push(eq);
                }
            }
        }
        out
    }

    /// `h_1j = 0` for `j != 1`: `zeta` is an eigenvector of `S`.
    pub fn zeta_eigen_equations(&self) -> Vec<LinForm> {
        (2..=NORMAL)
            .map(|j| LinForm::unknown(&self.field, Unknown::h(1, j)))
            .collect()
    }
}

const FLIP: [i8; NORMAL] = [1, 1, -1, -1, -1];

/// Image of `form` under the change of unit normal `N -> -N`, which sends
/// `(xi, phi)` to `(-xi, -phi)`, `a` to `-a`, `S` to `-S` and the frame to
/// `{zeta, phi1zeta, -phi2zeta, -phi3zeta, -xi}`.
pub fn reflect_form(form: &LinForm) -> LinForm {
    let f = form.field();
    let mut map = std::collections::BTreeMap::new();
    if let Some(a) = f.lookup("a") {
        map.insert(a, -&Scalar::sym(f, a));
    }
    let flip = Substitution {
        from: f.clone(),
        to: f.clone(),
        map,
    };
    let constant = flip.apply(form.constant_term()).expect("sign change keeps denominators");
    form.terms().fold(LinForm::constant(constant), |acc, (u, c)| {
        let c = flip.apply(c).expect("sign change keeps denominators");
        let sign = match *u {
            Unknown::H(i, j) => -FLIP[i as usize - 1] * FLIP[j as usize - 1],
            Unknown::Deriv(k, CoefFn::A) => -FLIP[k as usize - 1],
            Unknown::Deriv(k, _) => FLIP[k as usize - 1],
        };
        let c = if sign < 0 { -&c } else { c };
        acc.add(&LinForm::term(*u, c))
    })
}

/// Whether the defining equations of `kind` are preserved, triple by triple
/// and up to sign, by [`reflect_form`].
pub fn reflection_invariant(ac: &ACFrame, kind: AcKind) -> bool {
    (0..NORMAL).all(|x| {
        (0..NORMAL).all(|y| {
            (0..NORMAL).all(|z| {
                let e = ac.defining_equation(kind, &ac.e(x), &ac.e(y), &ac.e(z));
                let r = reflect_form(&e);
                r == e || r == e.neg()
            })
        })
    })
}

/// One exact property of the adapted frame.
#[derive(Clone, Debug, Serialize)]
pub struct FrameCheck {
    pub id: String,
    pub passed: bool,
}

/// Exact checks of the structure identities on the adapted frame.
pub fn validate_ac_frame(ac: &ACFrame) -> Vec<FrameCheck> {
    let mut out = Vec::new();
    let mut push = |id: &str, ok: bool| out.push(FrameCheck { id: id.into(), passed: ok });
    let tangent: Vec<Vector> = (0..NORMAL).map(|i| ac.e(i)).collect();
    push(
        "frame labels: phi_i zeta = E_(i+1)",
        (0..3).all(|i| ac.phi[i].apply(&tangent[0]) == ac.e(i + 1)),
    );
    push("xi = -JN", ac.j.apply(&ac.normal()).neg() == ac.xi());
    for (i, p) in ac.phi.iter().enumerate() {
        let sq_ok = tangent.iter().all(|x| {
            let lhs = p.apply(&p.apply(x));
            let rhs = x.neg().add(&ac.xi().scale(&ac.eta(x)));
            lhs == rhs
        });
        push(&format!("phi{}^2 = -Id + eta (x) xi", i + 1), sq_ok);
        let metric_ok = tangent.iter().all(|x| {
            tangent.iter().all(|y| ac.g(&p.apply(x), &p.apply(y)) == &ac.g(x, y) - &(&ac.eta(x) * &ac.eta(y)))
        });
        push(&format!("phi{} compatible with g", i + 1), metric_ok);
        let tangent_ok = tangent.iter().all(|x| p.apply(x).0[NORMAL].is_zero());
        push(&format!("phi{} tangent", i + 1), tangent_ok);
        let skew_ok = tangent
            .iter()
            .all(|x| tangent.iter().all(|y| (&ac.omega(i + 1, x, y) + &ac.omega(i + 1, y, x)).is_zero()));
        push(&format!("omega{} antisymmetric", i + 1), skew_ok);
    }
    let composed = tangent
        .iter()
        .all(|x| ac.phi[2].apply(x) == ac.phi[1].apply(&ac.phi[0].apply(x)));
    push("phi3 = phi2 phi1", composed);
    push("phi1 xi = 0 and eta phi1 = 0", {
        ac.phi[0].apply(&ac.xi()).is_zero() && tangent.iter().all(|x| ac.eta(&ac.phi[0].apply(x)).is_zero())
    });
    out
}

/// Outcome of the Killing-Reeb reduction.
#[derive(Clone, Debug, Serialize)]
pub struct KContactReduction {
    /// Relations from the symmetric part of `phi_1 S` alone.
    pub killing: Vec<String>,
    /// Relations once `zeta` is also an eigenvector of `S`.
    pub full: Vec<String>,
    pub checks: Vec<FrameCheck>,
}

pub fn kcontact_solution(ac: &ACFrame) -> Solution {
    let mut sys = EqSystem::single(&ac.field, ac.kcontact_equations());
    sys.push_stage(ac.zeta_eigen_equations());
    eliminate(&sys)
}

/// Derives the diagonal form of `S` on the adapted frame from the Killing
/// condition.
pub fn verify_kcontact_reduction(ac: &ACFrame) -> KContactReduction {
    let killing = eliminate(&EqSystem::single(&ac.field, ac.kcontact_equations()));
    let full = kcontact_solution(ac);
    let f = &ac.field;
    let h = |i, j| LinForm::unknown(f, Unknown::h(i, j));
    let zero_in = |sol: &Solution, form: LinForm| sol.reduce(&form).is_zero();
    let mut checks = Vec::new();
    let mut push = |id: String, ok: bool| checks.push(FrameCheck { id, passed: ok });
    push(
        "xi is an eigenvector of S".into(),
        (1..5).all(|i| zero_in(&killing, h(i, 5))),
    );
    push("h12 = 0".into(), zero_in(&killing, h(1, 2)));
    push("h11 = h22".into(), zero_in(&killing, h(1, 1).sub(&h(2, 2))));
    for i in 1..=5 {
        for j in i + 1..=5 {
            push(format!("h{i}{j} = 0 with zeta an eigenvector"), zero_in(&full, h(i, j)));
        }
    }
    push("h33 = h44".into(), zero_in(&full, h(3, 3).sub(&h(4, 4))));
    push(
        "diagonal entries h11, h33, h55 stay free".into(),
        [(1, 1), (3, 3), (5, 5)].iter().all(|&(i, j)| !full.relations.contains_key(&Unknown::h(i, j))),
    );
    // S = lambda Id satisfies the Killing system identically.
    let lam_ok = ac.kcontact_equations().iter().all(|eq| {
        let mut e = eq.clone();
        for i in 1..=5 {
            for j in i..=5 {
                let v = if i == j { LinForm::constant(Scalar::int(f, 7)) } else { LinForm::zero(f) };
                e = e.replace(Unknown::h(i, j), &v);
            }
        }
        e.is_zero()
    });
    push("S = lambda Id satisfies the Killing system".into(), lam_ok);
    KContactReduction {
        killing: killing.relation_strings(),
        full: full.relation_strings(),
        checks,
    }
}

pub fn kcontact_report(ac: &ACFrame) -> Report {
    let red = verify_kcontact_reduction(ac);
    let mut items: Vec<Item> = validate_ac_frame(ac)
        .into_iter()
        .map(|c| Item::new(format!("frame: {}", c.id), c.passed))
        .collect();
    for c in &red.checks {
        items.push(Item::new(format!("kcontact: {}", c.id), c.passed));
    }
    items.push(
        Item::new("kcontact: relations", red.checks.iter().all(|c| c.passed))
            .relations(red.full.clone())
            .residual(Residual::Forms(Vec::new())),
    );
    Report::self_keyed("kcontact-reduction", items)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn frame() -> ACFrame {
        build_ac_frame()
    }

    #[test]
    fn adapted_frame_identities_hold() {
        let ac = frame();
        for c in validate_ac_frame(&ac) {
            assert!(c.passed, "{}", c.id);
        }
    }

    #[test]
    fn phi2_squared_on_zeta() {
        let ac = frame();
        let z = ac.e(0);
        assert_eq!(ac.gt(&ac.xi(), &ac.gt(&ac.xi(), &z)), z.neg());
    }

    #[test]
    fn covariant_derivatives_are_tangent() {
        let ac = frame();
        for i in 1..=3 {
            for x in 0..NORMAL {
                for y in 0..NORMAL {
                    let v = ac.covariant_phi(i, &ac.e(x), &ac.e(y));
                    assert!(v.0[NORMAL].is_zero(), "phi{i} on ({x},{y}): {}", v.0[NORMAL]);
                }
            }
        }
    }

    #[test]
    fn phi3_on_zeta_zeta() {
        let ac = frame();
        let z = ac.e(0);
        let v = ac.covariant_phi(3, &z, &z);
        assert_eq!(*v.0[XI].constant_term(), Scalar::int(&ac.field, -1));
        assert!(v.0[0].is_zero());
        let s_zero = |c: &LinForm| c.unknowns().into_iter().fold(c.clone(), |acc, u| acc.replace(u, &LinForm::zero(&ac.field)));
        assert_eq!(s_zero(&v.0[XI]), LinForm::constant(Scalar::int(&ac.field, -1)));
    }

    #[test]
    fn phi2_on_xi_zeta_contains_h55_phi3_term() {
        let ac = frame();
        let v = ac.covariant_phi(2, &ac.xi(), &ac.e(0));
        assert_eq!(v.0[3].coeff(Unknown::h(5, 5)), Scalar::one(&ac.field));
    }

    #[test]
    fn sasakian_vanishes_for_phi3_and_zero_shape() {
        let ac = frame();
        let f = &ac.field;
        let (a, b, c) = (ac.coef[0], ac.coef[1], ac.coef[2]);
        let s1 = f.substitute(a, &Scalar::zero(f)).unwrap();
        let s2 = s1.to.substitute(b, &Scalar::zero(&s1.to)).unwrap();
        let s3 = s2.to.substitute(c, &Scalar::one(&s2.to)).unwrap();
        for x in 0..NORMAL {
            for y in 0..NORMAL {
                for z in 0..NORMAL {
                    let mut eq = ac.defining_equation(AcKind::Sasakian, &ac.e(x), &ac.e(y), &ac.e(z));
                    for s in [&s1, &s2, &s3] {
                        eq = eq.apply(s).unwrap();
                    }
                    let fz = s3.to.clone();
                    let mut zeroed = eq.clone();
                    for u in eq.unknowns() {
                        zeroed = zeroed.replace(u, &LinForm::zero(&fz));
                    }
                    assert!(zeroed.is_zero(), "({x},{y},{z}): {eq}");
                }
            }
        }
    }

    #[test]
    fn nearly_cosymplectic_vanishes_for_phi1_and_reeb_shape() {
        let ac = frame();
        let f = &ac.field;
        let (a, b) = (ac.coef[0], ac.coef[1]);
        let s1 = f.substitute(a, &Scalar::one(f)).unwrap();
        let s2 = s1.to.substitute(b, &Scalar::zero(&s1.to)).unwrap();
        let fz = s2.to.clone();
        for x in 0..NORMAL {
            for y in 0..NORMAL {
                for z in 0..NORMAL {
                    let mut eq = ac.defining_equation(AcKind::NearlyCosymplectic, &ac.e(x), &ac.e(y), &ac.e(z));
                    eq = eq.apply(&s1).unwrap().apply(&s2).unwrap();
                    let mut v = eq.clone();
                    for u in eq.unknowns() {
                        let value = if u == Unknown::h(5, 5) {
                            LinForm::constant(Scalar::int(&fz, 3))
                        } else {
                            LinForm::zero(&fz)
                        };
                        v = v.replace(u, &value);
                    }
                    assert!(v.is_zero(), "({x},{y},{z}): {eq}");
                }
            }
        }
    }

    #[test]
    fn nearly_sasakian_is_symmetrised_sasakian() {
        let ac = frame();
        for x in 0..NORMAL {
            for y in 0..NORMAL {
                for z in 0..NORMAL {
                    let (ex, ey, ez) = (ac.e(x), ac.e(y), ac.e(z));
                    let ns = ac.defining_equation(AcKind::NearlySasakian, &ex, &ey, &ez);
                    let sym = ac
                        .defining_equation(AcKind::Sasakian, &ex, &ey, &ez)
                        .add(&ac.defining_equation(AcKind::Sasakian, &ey, &ex, &ez));
                    assert_eq!(ns, sym);
                }
            }
        }
    }

    #[test]
    fn normal_flip_preserves_every_class() {
        let ac = frame();
        for kind in AcKind::ALL {
            assert!(reflection_invariant(&ac, kind), "{kind}");
        }
    }

    #[test]
    fn kcontact_reduction_diagonalises() {
        let ac = frame();
        let red = verify_kcontact_reduction(&ac);
        for c in &red.checks {
            assert!(c.passed, "{} / {:?}", c.id, red.full);
        }
    }

    #[test]
    fn sasakian_zeta_phi1zeta_xi_gives_b() {
        let ac = frame();
        let eq = ac.defining_equation(AcKind::Sasakian, &ac.e(0), &ac.e(1), &ac.xi());
        let reduced = kcontact_solution(&ac).reduce(&eq);
        let b = LinForm::constant(ac.coef_scalar(1));
        assert!(crate::linform::match_up_to_unit(&reduced, &b).is_ok(), "{reduced}");
    }
}
