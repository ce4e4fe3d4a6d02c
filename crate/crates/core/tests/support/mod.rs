//! Shared test helpers: polynomial fields and a brute-force estimator oracle.
#![allow(dead_code, clippy::needless_range_loop)]

use std::collections::HashMap;

use ipdg_core::materials::{Material, MaterialTable};
use ipdg_core::mesh::{generate_unit_square, refine, BoundaryTag, MaterialSplit, Mesh, SideTags, SplitAxis};
use ipdg_core::spaces::{line_rule, triangle_rule, DgSpace};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Polynomial `sum c x^a y^b` stored by exponent pairs.
#[derive(Clone)]
pub struct Poly(pub Vec<((i32, i32), f64)>);

impl Poly {
    pub fn random(degree: i32, rng: &mut ChaCha8Rng) -> Self {
        let mut terms = Vec::new();
        for a in 0..=degree {
            for b in 0..=(degree - a) {
                terms.push(((a, b), rng.random_range(-1.0..1.0)));
            }
        }
        Poly(terms)
    }

    /// Partial derivative `d^(i+j) / dx^i dy^j` at `x`.
    pub fn d(&self, i: i32, j: i32, x: [f64; 2]) -> f64 {
        let fall = |n: i32, k: i32| (0..k).map(|t| (n - t) as f64).product::<f64>();
        self.0
            .iter()
            .filter(|((a, b), _)| *a >= i && *b >= j)
            .map(|&((a, b), c)| c * fall(a, i) * fall(b, j) * x[0].powi(a - i) * x[1].powi(b - j))
            .sum()
    }
}

pub struct Fields {
    pub u: Vec<[Poly; 2]>,
    pub p: Vec<Poly>,
}

/// Nodal interpolation, exact for polynomials of the space degree.
pub fn interpolate(mesh: &Mesh, space: &DgSpace, f: &Fields) -> (Vec<f64>, Vec<f64>) {
    let mut u = vec![0.0; space.n_u()];
    let mut p = vec![0.0; space.n_p()];
    for e in 0..mesh.n_elements() {
        let g = mesh.geometry(e);
        for (i, &node) in space.velocity_basis().nodes().iter().enumerate() {
            let x = g.to_physical(node);
            for c in 0..2 {
                u[space.u_dof(e, c, i)] = f.u[e][c].d(0, 0, x);
            }
        }
        for (i, &node) in space.pressure_basis().nodes().iter().enumerate() {
            p[space.p_dof(e, i)] = f.p[e].d(0, 0, g.to_physical(node));
        }
    }
    (u, p)
}

/// Brute-force indicators straight from the definitions.
pub fn oracle(mesh: &Mesh, mats: &MaterialTable, f: &Fields, kappa: f64, a_s: f64, degree: usize) -> Vec<[f64; 4]> {
    let q = triangle_rule(degree).unwrap();
    let line = line_rule(degree).unwrap();
    let tris = mesh.triangles();
    let vx = mesh.vertices();
    let mut owners: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    for (e, t) in tris.iter().enumerate() {
        for i in 0..3 {
            let (a, b) = (t[i], t[(i + 1) % 3]);
            owners.entry((a.min(b), a.max(b))).or_default().push(e);
        }
    }
    let stress = |e: usize, x: [f64; 2]| {
        let mu = mats.mu(mesh.material(e)).unwrap();
        let g = |c: usize, d: usize| {
            if d == 0 {
                f.u[e][c].d(1, 0, x)
            } else {
                f.u[e][c].d(0, 1, x)
            }
        };
        let mut s = [[0.0; 2]; 2];
        for a in 0..2 {
            for b in 0..2 {
                s[a][b] = mu * (g(a, b) + g(b, a));
            }
        }
        s
    };
    let mut out = Vec::new();
    for (e, t) in tris.iter().enumerate() {
        let id = mesh.material(e);
        let (mu, il, rho) = (
            mats.mu(id).unwrap(),
            mats.inv_lambda(id).unwrap(),
            mats.density(id).unwrap(),
        );
        let v = [vx[t[0]], vx[t[1]], vx[t[2]]];
        let area2 = (v[1][0] - v[0][0]) * (v[2][1] - v[0][1]) - (v[2][0] - v[0][0]) * (v[1][1] - v[0][1]);
        let edges = [0, 1, 2].map(|i| {
            let (a, b) = (v[i], v[(i + 1) % 3]);
            ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
        });
        let h = edges.iter().copied().fold(0.0, f64::max);
        let (mut r, mut dv) = (0.0, 0.0);
        for (&xi, &w) in q.points.iter().zip(&q.weights) {
            let l = [1.0 - xi[0] - xi[1], xi[0], xi[1]];
            let x = [
                l[0] * v[0][0] + l[1] * v[1][0] + l[2] * v[2][0],
                l[0] * v[0][1] + l[1] * v[1][1] + l[2] * v[2][1],
            ];
            let (ux, uy, pp) = (&f.u[e][0], &f.u[e][1], &f.p[e]);
            let rx = kappa * rho * ux.d(0, 0, x) + mu * (2.0 * ux.d(2, 0, x) + ux.d(0, 2, x) + uy.d(1, 1, x))
                - pp.d(1, 0, x);
            let ry = kappa * rho * uy.d(0, 0, x) + mu * (uy.d(2, 0, x) + 2.0 * uy.d(0, 2, x) + ux.d(1, 1, x))
                - pp.d(0, 1, x);
            r += w * area2 * (rx * rx + ry * ry);
            let d = ux.d(1, 0, x) + uy.d(0, 1, x) + il * pp.d(0, 0, x);
            dv += w * area2 * d * d;
        }
        let eta_r2 = h * h / (2.0 * mu) * r + dv / (1.0 / (2.0 * mu) + il);

        let (mut ef, mut ej) = (0.0, 0.0);
        for i in 0..3 {
            let (ia, ib) = (t[i], t[(i + 1) % 3]);
            let (a, b) = (vx[ia], vx[ib]);
            let len = edges[i];
            let n = [(b[1] - a[1]) / len, -(b[0] - a[0]) / len];
            let key = (ia.min(ib), ia.max(ib));
            let other = owners[&key].iter().copied().find(|&o| o != e);
            let tag = mesh.boundary_tags().get(&[key.0, key.1]).copied();
            for (&s, &w) in line.points.iter().zip(&line.weights) {
                let x = [a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])];
                let w = w * len;
                let trac = |k: usize| {
                    let sg = stress(k, x);
                    let pk = f.p[k].d(0, 0, x);
                    [0, 1].map(|c| pk * n[c] - sg[c][0] * n[0] - sg[c][1] * n[1])
                };
                let uval = |k: usize| [f.u[k][0].d(0, 0, x), f.u[k][1].d(0, 0, x)];
                match (other, tag) {
                    (Some(o), None) => {
                        let (t1, t2) = (trac(e), trac(o));
                        ef += w * len / (2.0 * mu) * ((t1[0] - t2[0]).powi(2) + (t1[1] - t2[1]).powi(2));
                        let (u1, u2) = (uval(e), uval(o));
                        ej += w * 2.0 * mu * a_s / len * ((u1[0] - u2[0]).powi(2) + (u1[1] - u2[1]).powi(2));
                    }
                    (None, Some(BoundaryTag::Neumann)) => {
                        let t1 = trac(e);
                        ef += w * len / (2.0 * mu) * (t1[0] * t1[0] + t1[1] * t1[1]);
                    }
                    (None, Some(BoundaryTag::Dirichlet)) => {
                        let u1 = uval(e);
                        ej += w * 2.0 * mu * a_s / len * (u1[0] * u1[0] + u1[1] * u1[1]);
                    }
                    _ => panic!("inconsistent edge"),
                }
            }
        }
        out.push([eta_r2.sqrt(), ef.sqrt(), ej.sqrt(), 0.0]);
    }
    out
}

pub fn two_material_mesh() -> (Mesh, MaterialTable) {
    let split = MaterialSplit {
        axis: SplitAxis::Horizontal,
        at: 0.5,
        first: 0,
        second: 1,
    };
    let mesh = generate_unit_square(2, SideTags::sides_clamped(), Some(split)).unwrap();
    let mesh = refine(&mesh, &[1, 4]).unwrap();
    let mats = MaterialTable::new(
        0.35,
        [
            (
                0,
                Material {
                    young: 3.0,
                    density: 2.0,
                },
            ),
            (
                1,
                Material {
                    young: 1.0,
                    density: 0.5,
                },
            ),
        ],
    )
    .unwrap();
    (mesh, mats)
}

pub fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-300)
}

/// Random element-wise polynomials of degree `k` (displacement) and `k - 1` (pressure).
pub fn random_fields(mesh: &Mesh, k: usize, rng: &mut ChaCha8Rng) -> Fields {
    Fields {
        u: (0..mesh.n_elements())
            .map(|_| [Poly::random(k as i32, rng), Poly::random(k as i32, rng)])
            .collect(),
        p: (0..mesh.n_elements())
            .map(|_| Poly::random(k as i32 - 1, rng))
            .collect(),
    }
}
