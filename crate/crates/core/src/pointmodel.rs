//! Point models of the four homogeneous nearly Kähler spaces on the basis
//! `{f1, Jf1, f2, Jf2, f3, Jf3}` with identity Gram matrix, and the exact
//! identity suite for `G`.

use std::collections::VecDeque;
use std::fmt::Write as _;
use std::sync::Arc;

use serde::Serialize;

mod cross;

pub use cross::{cross_check_items, frame_cross_check, sample_instance, CrossCheck, CrossCheckError, Instance};

use crate::curvature::{Aux, Geometry, Space};
use crate::frames::FrameReport;
use crate::report::{Item, Report, Residual};
use crate::scalar::{Field, Rational, Scalar};
use crate::tensor::{Matrix, Metric, Vector, DIM};

pub const BASIS: [&str; DIM] = ["f1", "Jf1", "f2", "Jf2", "f3", "Jf3"];

/// Structure constants: `G(e_i, e_j) = sum_k omega[i][j][k] e_k`.
pub type Omega = [[[i8; DIM]; DIM]; DIM];

#[derive(Clone, Debug)]
pub struct SpaceModel {
    pub field: Arc<Field>,
    pub geom: Geometry,
    pub omega: Omega,
}

/// `J e_i = sign * e_partner`.
fn j_image(i: usize) -> (i8, usize) {
    if i.is_multiple_of(2) {
        (1, i + 1)
    } else {
        (-1, i - 1)
    }
}

/// Closes `omega(f1,f2,f3) = 1` under alternation and
/// `omega(JX,Y,Z) = omega(X,JY,Z) = omega(X,Y,JZ)`. Fails on a conflict.
pub fn generate_omega() -> Result<Omega, String> {
    let mut table: [[[Option<i8>; DIM]; DIM]; DIM] = [[[None; DIM]; DIM]; DIM];
    let mut queue = VecDeque::new();
    queue.push_back(([0usize, 2, 4], 1i8));
    while let Some((idx, v)) = queue.pop_front() {
        let slot = &mut table[idx[0]][idx[1]][idx[2]];
        match *slot {
            Some(old) if old == v => continue,
            Some(old) => {
                return Err(format!(
                    "conflict at ({},{},{}): {old} vs {v}",
                    BASIS[idx[0]], BASIS[idx[1]], BASIS[idx[2]]
                ))
            }
            None => *slot = Some(v),
        }
        let [a, b, c] = idx;
        queue.push_back(([b, a, c], -v));
        queue.push_back(([a, c, b], -v));
        // s_x omega(p(x),..,z) = s_z omega(x,..,p(z)) with x = p(a), z = c,
        // where J e_i = s_i e_p(i) and s_p(i) = -s_i
        for (pos_from, pos_to) in [(0, 2), (0, 1), (1, 2)] {
            let mut next = idx;
            let (sa, pa) = j_image(idx[pos_from]);
            let (sc, pc) = j_image(idx[pos_to]);
            next[pos_from] = pa;
            next[pos_to] = pc;
            queue.push_back((next, -sa * sc * v));
        }
    }
    let mut out = [[[0i8; DIM]; DIM]; DIM];
    for i in 0..DIM {
        for j in 0..DIM {
            for k in 0..DIM {
                out[i][j][k] = table[i][j][k].unwrap_or(0);
            }
        }
    }
    Ok(out)
}

fn restricted(j: &Matrix, plus: &[usize]) -> Matrix {
    let mut m = j.neg();
    for &k in plus {
        m.cols[k] = j.cols[k].clone();
    }
    m
}

/// Builds the point model of `space`.
pub fn build_model(space: Space) -> SpaceModel {
    let field = Field::empty();
    let j = Matrix::signed_permutation(&field, [(1, 1), (-1, 0), (1, 3), (-1, 2), (1, 5), (-1, 4)]);
    let aux = match space {
        Space::S6 => Aux::None,
        Space::S3xS3 => Aux::P(Matrix::signed_permutation(
            &field,
            [(-1, 0), (1, 1), (-1, 2), (1, 3), (-1, 4), (1, 5)],
        )),
        Space::CP3 => Aux::Jo(restricted(&j, &[0, 1])),
        Space::FlagC3 => Aux::Flag([
            restricted(&j, &[0, 1]),
            restricted(&j, &[2, 3]),
            restricted(&j, &[4, 5]),
        ]),
    };
    let omega = generate_omega().expect("generator closure is consistent");
    SpaceModel {
        geom: Geometry {
            space,
            metric: Metric::identity(&field),
            j,
            aux,
        },
        field,
        omega,
    }
}

impl SpaceModel {
    pub fn space(&self) -> Space {
        self.geom.space
    }

    pub fn e(&self, i: usize) -> Vector {
        Vector::basis(&self.field, i)
    }

    pub fn g(&self, x: &Vector, y: &Vector) -> Scalar {
        self.geom.metric.g(x, y)
    }

    pub fn j(&self, x: &Vector) -> Vector {
        self.geom.j.apply(x)
    }

    /// `G(X,Y)` by bilinear extension.
    pub fn gt(&self, x: &Vector, y: &Vector) -> Vector {
        let mut out = vec![Scalar::zero(&self.field); DIM];
        for i in 0..DIM {
            if x.0[i].is_zero() {
                continue;
            }
            for j in 0..DIM {
                if y.0[j].is_zero() {
                    continue;
                }
                let xy = &x.0[i] * &y.0[j];
                for (k, o) in out.iter_mut().enumerate() {
                    let c = self.omega[i][j][k];
                    if c != 0 {
                        *o = &*o + &xy.scale(&Rational::from_integer((c as i64).into()));
                    }
                }
            }
        }
        Vector(out)
    }

    /// Right-hand side of the `G(G(X,Y),Z)` identity.
    pub fn gg_rhs(&self, x: &Vector, y: &Vector, z: &Vector) -> Vector {
        let (jx, jy) = (self.j(x), self.j(y));
        y.scale(&self.g(x, z))
            .sub(&x.scale(&self.g(y, z)))
            .sub(&jy.scale(&self.g(&jx, z)))
            .add(&jx.scale(&self.g(&jy, z)))
    }

    /// Right-hand side of the `(nabla G)(X,Y,Z)` identity.
    pub fn nabla_g(&self, x: &Vector, y: &Vector, z: &Vector) -> Vector {
        let (jy, jz) = (self.j(y), self.j(z));
        x.scale(&self.g(y, &jz))
            .add(&jy.scale(&self.g(x, z)))
            .sub(&jz.scale(&self.g(x, y)))
    }

    /// Canonical text listing `J`, the nonzero `G` components and the
    /// auxiliary matrices.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "space {}", self.space());
        let _ = writeln!(s, "basis {}", BASIS.join(" "));
        let _ = writeln!(s, "J");
        for j in 0..DIM {
            let _ = writeln!(s, "  J {} = {}", BASIS[j], fmt_vec(&self.geom.j.cols[j]));
        }
        let _ = writeln!(s, "G");
        for i in 0..DIM {
            for j in 0..DIM {
                let v = self.gt(&self.e(i), &self.e(j));
                if !v.is_zero() {
                    let _ = writeln!(s, "  G({},{}) = {}", BASIS[i], BASIS[j], fmt_vec(&v));
                }
            }
        }
        for (name, m) in self.geom.aux.named() {
            let _ = writeln!(s, "{name}");
            for j in 0..DIM {
                let _ = writeln!(s, "  {name} {} = {}", BASIS[j], fmt_vec(&m.cols[j]));
            }
        }
        s
    }
}

fn fmt_vec(v: &Vector) -> String {
    let mut parts = Vec::new();
    for (i, c) in v.0.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let t = c.to_string();
        parts.push(match t.as_str() {
            "1" => BASIS[i].to_string(),
            "-1" => format!("-{}", BASIS[i]),
            _ => format!("{t}*{}", BASIS[i]),
        });
    }
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" + ").replace("+ -", "- ")
    }
}

/// Outcome of one identity over all basis tuples.
#[derive(Clone, Debug, Serialize)]
pub struct IdentityCheck {
    pub id: String,
    pub tuples: usize,
    pub failures: usize,
    /// First nonzero residual, or `0`.
    pub residual: String,
}

impl IdentityCheck {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentityReport {
    pub space: Space,
    pub checks: Vec<IdentityCheck>,
}

impl IdentityReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(IdentityCheck::passed)
    }
}

struct Tally {
    id: String,
    tuples: usize,
    failures: usize,
    residual: Option<String>,
}

impl Tally {
    fn new(id: &str) -> Tally {
        Tally {
            id: id.to_string(),
            tuples: 0,
            failures: 0,
            residual: None,
        }
    }

    fn vec(&mut self, r: &Vector) {
        self.tuples += 1;
        if !r.is_zero() {
            self.failures += 1;
            self.residual.get_or_insert_with(|| fmt_vec(r));
        }
    }

    fn scalar(&mut self, r: &Scalar) {
        self.tuples += 1;
        if !r.is_zero() {
            self.failures += 1;
            self.residual.get_or_insert_with(|| r.to_string());
        }
    }

    fn done(self) -> IdentityCheck {
        IdentityCheck {
            id: self.id,
            tuples: self.tuples,
            failures: self.failures,
            residual: self.residual.unwrap_or_else(|| "0".into()),
        }
    }
}

fn each2(mut f: impl FnMut(usize, usize)) {
    for a in 0..DIM {
        for b in 0..DIM {
            f(a, b)
        }
    }
}

fn each3(mut f: impl FnMut(usize, usize, usize)) {
    each2(|a, b| (0..DIM).for_each(|c| f(a, b, c)));
}

fn each4(mut f: impl FnMut(usize, usize, usize, usize)) {
    each3(|a, b, c| (0..DIM).for_each(|d| f(a, b, c, d)));
}

/// Exhaustive exact check of the structure identities on basis tuples.
pub fn verify_identities(m: &SpaceModel) -> IdentityReport {
    let e: Vec<Vector> = (0..DIM).map(|i| m.e(i)).collect();
    let mut checks = Vec::new();

    let mut t = Tally::new("J^2 = -Id");
    (0..DIM).for_each(|a| t.vec(&m.j(&m.j(&e[a])).add(&e[a])));
    checks.push(t.done());

    let mut t = Tally::new("g(JX,JY) = g(X,Y)");
    each2(|a, b| t.scalar(&(&m.g(&m.j(&e[a]), &m.j(&e[b])) - &m.g(&e[a], &e[b]))));
    checks.push(t.done());

    let mut t = Tally::new("G(X,Y) + G(Y,X) = 0");
    each2(|a, b| t.vec(&m.gt(&e[a], &e[b]).add(&m.gt(&e[b], &e[a]))));
    checks.push(t.done());

    let mut t = Tally::new("G(X,JY) + JG(X,Y) = 0");
    each2(|a, b| t.vec(&m.gt(&e[a], &m.j(&e[b])).add(&m.j(&m.gt(&e[a], &e[b])))));
    checks.push(t.done());

    let mut t = Tally::new("g(G(X,Y),Z) + g(G(X,Z),Y) = 0");
    each3(|a, b, c| t.scalar(&(&m.g(&m.gt(&e[a], &e[b]), &e[c]) + &m.g(&m.gt(&e[a], &e[c]), &e[b]))));
    checks.push(t.done());

    let mut t = Tally::new("g(G(X,Y),JZ) + g(G(X,Z),JY) = 0");
    each3(|a, b, c| {
        t.scalar(
            &(&m.g(&m.gt(&e[a], &e[b]), &m.j(&e[c])) + &m.g(&m.gt(&e[a], &e[c]), &m.j(&e[b]))),
        )
    });
    checks.push(t.done());

    let mut t = Tally::new("|G(X,Y)|^2");
    each2(|a, b| {
        let (x, y) = (&e[a], &e[b]);
        let gxy = m.gt(x, y);
        let rhs = &(&(&m.g(x, x) * &m.g(y, y)) - &(&m.g(x, y) * &m.g(x, y)))
            - &(&m.g(&m.j(x), y) * &m.g(&m.j(x), y));
        t.scalar(&(&m.g(&gxy, &gxy) - &rhs));
    });
    checks.push(t.done());

    let mut t = Tally::new("g(G(X,Y),G(Z,W))");
    each4(|a, b, c, d| {
        let (x, y, z, w) = (&e[a], &e[b], &e[c], &e[d]);
        let lhs = m.g(&m.gt(x, y), &m.gt(z, w));
        let rhs = &(&(&(&m.g(x, z) * &m.g(y, w)) - &(&m.g(x, w) * &m.g(y, z)))
            + &(&m.g(&m.j(x), z) * &m.g(y, &m.j(w))))
            - &(&m.g(&m.j(x), w) * &m.g(y, &m.j(z)));
        t.scalar(&(&lhs - &rhs));
    });
    checks.push(t.done());

    let mut t = Tally::new("G(G(X,Y),Z)");
    each3(|a, b, c| t.vec(&m.gt(&m.gt(&e[a], &e[b]), &e[c]).sub(&m.gg_rhs(&e[a], &e[b], &e[c]))));
    checks.push(t.done());

    let mut t = Tally::new("G(G(G(X,Y),Z),W) via inner expansion");
    each4(|a, b, c, d| {
        let direct = m.gt(&m.gt(&m.gt(&e[a], &e[b]), &e[c]), &e[d]);
        let inner = m.gt(&m.gg_rhs(&e[a], &e[b], &e[c]), &e[d]);
        let outer = m.gg_rhs(&m.gt(&e[a], &e[b]), &e[c], &e[d]);
        t.vec(&direct.sub(&inner));
        t.vec(&direct.sub(&outer));
    });
    checks.push(t.done());

    // consequences of differentiating the pointwise identities, with
    // (nabla_W G)(X,Y) replaced by its closed form
    let mut t = Tally::new("nablaG skew in its G-slots");
    each3(|a, b, c| t.vec(&m.nabla_g(&e[a], &e[b], &e[c]).add(&m.nabla_g(&e[a], &e[c], &e[b]))));
    checks.push(t.done());

    let mut t = Tally::new("nablaG compatible with g");
    each4(|a, b, c, d| {
        t.scalar(
            &(&m.g(&m.nabla_g(&e[a], &e[b], &e[c]), &e[d]) + &m.g(&m.nabla_g(&e[a], &e[b], &e[d]), &e[c])),
        )
    });
    checks.push(t.done());

    let mut t = Tally::new("nablaG compatible with G(X,JY) + JG(X,Y) = 0");
    each3(|w, a, b| {
        let (w, x, y) = (&e[w], &e[a], &e[b]);
        let r = m
            .nabla_g(w, x, &m.j(y))
            .add(&m.j(&m.nabla_g(w, x, y)))
            .add(&m.gt(x, &m.gt(w, y)))
            .add(&m.gt(w, &m.gt(x, y)));
        t.vec(&r);
    });
    checks.push(t.done());

    match &m.geom.aux {
        Aux::None => {}
        Aux::P(p) => {
            let mut t = Tally::new("P^2 = Id");
            (0..DIM).for_each(|a| t.vec(&p.apply(&p.apply(&e[a])).sub(&e[a])));
            checks.push(t.done());
            let mut t = Tally::new("g(PX,PY) = g(X,Y)");
            each2(|a, b| t.scalar(&(&m.g(&p.apply(&e[a]), &p.apply(&e[b])) - &m.g(&e[a], &e[b]))));
            checks.push(t.done());
            let mut t = Tally::new("PJ = -JP");
            (0..DIM).for_each(|a| t.vec(&p.apply(&m.j(&e[a])).add(&m.j(&p.apply(&e[a])))));
            checks.push(t.done());
            let mut t = Tally::new("PG(X,Y) = -G(PX,PY)");
            each2(|a, b| {
                t.vec(&p.apply(&m.gt(&e[a], &e[b])).add(&m.gt(&p.apply(&e[a]), &p.apply(&e[b]))))
            });
            checks.push(t.done());
        }
        Aux::Jo(jo) => checks.extend(distribution_checks(m, "Jo", jo, &[0, 1])),
        Aux::Flag(js) => {
            for (k, ji) in js.iter().enumerate() {
                checks.extend(distribution_checks(m, &format!("J{}", k + 1), ji, &[2 * k, 2 * k + 1]));
            }
        }
    }
    IdentityReport {
        space: m.space(),
        checks,
    }
}

/// `A = J` on the listed basis vectors, `-J` on the rest; `A^2 = -Id`;
/// `A` is an isometry commuting with `J`.
fn distribution_checks(m: &SpaceModel, name: &str, a: &Matrix, plus: &[usize]) -> Vec<IdentityCheck> {
    let e: Vec<Vector> = (0..DIM).map(|i| m.e(i)).collect();
    let mut out = Vec::new();
    let mut t = Tally::new(&format!("{name} = +-J on the distributions"));
    for (i, ei) in e.iter().enumerate() {
        let want = if plus.contains(&i) { m.j(ei) } else { m.j(ei).neg() };
        t.vec(&a.apply(ei).sub(&want));
    }
    out.push(t.done());
    let mut t = Tally::new(&format!("{name}^2 = -Id"));
    e.iter().for_each(|x| t.vec(&a.apply(&a.apply(x)).add(x)));
    out.push(t.done());
    let mut t = Tally::new(&format!("g({name}X,{name}Y) = g(X,Y)"));
    each2(|i, j| t.scalar(&(&m.g(&a.apply(&e[i]), &a.apply(&e[j])) - &m.g(&e[i], &e[j]))));
    out.push(t.done());
    let mut t = Tally::new(&format!("{name}J = J{name}"));
    e.iter().for_each(|x| t.vec(&a.apply(&m.j(x)).sub(&m.j(&a.apply(x)))));
    out.push(t.done());
    out
}

fn identity_item(prefix: &str, c: &IdentityCheck) -> Item {
    let mut it = Item::new(format!("{prefix}: {}", c.id), c.passed())
        .detail(format!("{} tuples, {} nonzero", c.tuples, c.failures));
    if !c.passed() {
        it = it.residual(Residual::Forms(vec![c.residual.clone()]));
    }
    it
}

/// Identity suite over all four models, followed by the exact frame checks
/// and the numeric frame cross-checks drawn from `seed`.
pub fn identities_report(models: &[IdentityReport], frames: &[FrameReport], seed: u64) -> Report {
    let mut items: Vec<Item> = models
        .iter()
        .flat_map(|r| r.checks.iter().map(|c| identity_item(r.space.name(), c)))
        .collect();
    for f in frames {
        items.extend(f.checks.iter().map(|c| identity_item(&format!("frame {}", f.case), c)));
    }
    items.extend(cross_check_items(seed));
    Report::self_keyed("verify-identities", items)
}

/// Floating-point copy of a model for numeric instantiations.
#[derive(Clone, Debug)]
pub struct NumModel {
    pub j: [[f64; DIM]; DIM],
    pub aux: Vec<[[f64; DIM]; DIM]>,
    pub omega: Omega,
}

pub type V6 = [f64; DIM];

impl NumModel {
    pub fn new(m: &SpaceModel) -> NumModel {
        let none = |_| 0.0;
        NumModel {
            j: m.geom.j.eval(&none),
            aux: m.geom.aux.named().iter().map(|(_, a)| a.eval(&none)).collect(),
            omega: m.omega,
        }
    }

    pub fn apply(a: &[[f64; DIM]; DIM], x: &V6) -> V6 {
        std::array::from_fn(|i| (0..DIM).map(|k| a[i][k] * x[k]).sum())
    }

    pub fn j(&self, x: &V6) -> V6 {
        Self::apply(&self.j, x)
    }

    pub fn gt(&self, x: &V6, y: &V6) -> V6 {
        let mut out = [0.0; DIM];
        for i in 0..DIM {
            for j in 0..DIM {
                let xy = x[i] * y[j];
                if xy == 0.0 {
                    continue;
                }
                for (k, o) in out.iter_mut().enumerate() {
                    *o += self.omega[i][j][k] as f64 * xy;
                }
            }
        }
        out
    }
}

pub fn dot(x: &V6, y: &V6) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

pub fn lin(terms: &[(f64, &V6)]) -> V6 {
    let mut out = [0.0; DIM];
    for (k, v) in terms {
        for i in 0..DIM {
            out[i] += k * v[i];
        }
    }
    out
}

pub fn unit(i: usize) -> V6 {
    let mut v = [0.0; DIM];
    v[i] = 1.0;
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generator_gives_cross_product() {
        let m = build_model(Space::S6);
        assert_eq!(m.gt(&m.e(0), &m.e(2)), m.e(4));
        assert_eq!(m.gt(&m.e(2), &m.e(4)), m.e(0));
        assert_eq!(m.gt(&m.e(4), &m.e(0)), m.e(2));
        // G(G(f1,f2),f1) = f2
        assert_eq!(m.gt(&m.gt(&m.e(0), &m.e(2)), &m.e(0)), m.e(2));
        let g12 = m.gt(&m.e(0), &m.e(2));
        assert!(m.g(&g12, &g12).is_one());
    }

    #[test]
    fn skew_on_diagonal() {
        let m = build_model(Space::S6);
        for i in 0..DIM {
            assert!(m.gt(&m.e(i), &m.e(i)).is_zero());
        }
    }

    #[test]
    fn all_identities_hold_exactly() {
        for s in Space::ALL {
            let r = verify_identities(&build_model(s));
            for c in &r.checks {
                assert!(c.passed(), "{s}: {} residual {}", c.id, c.residual);
            }
        }
    }

    #[test]
    fn product_structure_on_g() {
        let m = build_model(Space::S3xS3);
        let Aux::P(p) = &m.geom.aux else { panic!() };
        let lhs = p.apply(&m.gt(&m.e(0), &m.e(2)));
        let rhs = m.gt(&p.apply(&m.e(0)), &p.apply(&m.e(2))).neg();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn dump_is_stable() {
        let a = build_model(Space::FlagC3).dump();
        assert_eq!(a, build_model(Space::FlagC3).dump());
        assert!(a.contains("G(f1,f2) = f3"));
        assert!(a.contains("J3 Jf3 = -f3"));
    }
}
