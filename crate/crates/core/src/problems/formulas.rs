//! Objective and gradient formulas of the bundled test problems.
//!
//! Each function writes into caller-provided buffers. Points outside the natural
//! domain of a formula produce NaN.

use std::f64::consts::PI;

use crate::types::Jacobian;

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Formula {
    Ap2,
    Ap4,
    Bk1,
    Dgo1,
    Dgo2,
    Far1,
    Fds,
    Ff1,
    Hil1,
    Jos1,
    Kw2,
    Lov1,
    Lov3,
    Lov4,
    Mgh33,
    Mhhm2,
    Mlf1,
    Mlf2,
    Mmr1,
    Mop3,
    Pnr,
    Sp1,
    Toi4,
    /// Witting's parametric problem with bump height `lambda`.
    Wit(f64),
}

impl Formula {
    pub(crate) fn evaluate(self, x: &[f64], f: &mut [f64]) {
        match self {
            Formula::Ap2 => {
                f[0] = x[0] * x[0] - 4.0;
                f[1] = (x[0] - 1.0).powi(2);
            }
            Formula::Ap4 => {
                let (a, b, c) = (x[0], x[1], x[2]);
                f[0] = ((a - 1.0).powi(4) + 2.0 * (b - 2.0).powi(4) + 3.0 * (c - 3.0).powi(4)) / 9.0;
                f[1] = ((a + b + c) / 3.0).exp() + a * a + b * b + c * c;
                f[2] = (3.0 * (-a).exp() + 4.0 * (-b).exp() + 3.0 * (-c).exp()) / 12.0;
            }
            Formula::Bk1 => {
                f[0] = x[0] * x[0] + x[1] * x[1];
                f[1] = (x[0] - 5.0).powi(2) + (x[1] - 5.0).powi(2);
            }
            Formula::Dgo1 => {
                f[0] = x[0].sin();
                f[1] = (x[0] + 0.7).sin();
            }
            Formula::Dgo2 => {
                f[0] = x[0] * x[0];
                f[1] = 9.0 - dgo2_root(x[0]);
            }
            Formula::Far1 => {
                f[0] = FAR1_F1.iter().map(|b| b.value(x)).sum();
                f[1] = FAR1_F2.iter().map(|b| b.value(x)).sum();
            }
            Formula::Fds => {
                let n = x.len() as f64;
                let mut s1 = 0.0;
                let mut s3 = 0.0;
                for (idx, &xi) in x.iter().enumerate() {
                    let i = (idx + 1) as f64;
                    s1 += i * (xi - i).powi(4);
                    s3 += i * (n - i + 1.0) * (-xi).exp();
                }
                f[0] = s1 / (n * n);
                f[1] = (x.iter().sum::<f64>() / n).exp() + x.iter().map(|v| v * v).sum::<f64>();
                f[2] = s3 / (n * (n + 1.0));
            }
            Formula::Ff1 => {
                f[0] = 1.0 - (-(x[0] - 1.0).powi(2) - (x[1] + 1.0).powi(2)).exp();
                f[1] = 1.0 - (-(x[0] + 1.0).powi(2) - (x[1] - 1.0).powi(2)).exp();
            }
            Formula::Hil1 => {
                let (a, b) = hil1_parts(x);
                f[0] = a.cos() * b;
                f[1] = a.sin() * b;
            }
            Formula::Jos1 => {
                let n = x.len() as f64;
                f[0] = x.iter().map(|v| v * v).sum::<f64>() / n;
                f[1] = x.iter().map(|v| (v - 2.0).powi(2)).sum::<f64>() / n;
            }
            Formula::Kw2 => {
                let k = Kw2::new(x);
                f[0] = -3.0 * k.a + 10.0 * k.b + 3.0 * k.c - x[0] - 0.5 * x[1];
                f[1] = -3.0 * k.d + 10.0 * k.e + 3.0 * k.g;
            }
            Formula::Lov1 => {
                f[0] = 1.05 * x[0] * x[0] + 0.98 * x[1] * x[1];
                f[1] = 0.99 * (x[0] - 3.0).powi(2) + 1.03 * (x[1] - 2.5).powi(2);
            }
            Formula::Lov3 => {
                f[0] = x[0] * x[0] + x[1] * x[1];
                f[1] = (x[0] - 6.0).powi(2) - (x[1] + 0.3).powi(2);
            }
            Formula::Lov4 => {
                let (e1, e2) = lov4_bumps(x);
                f[0] = x[0] * x[0] + x[1] * x[1] + 4.0 * (e1 + e2);
                f[1] = (x[0] - 6.0).powi(2) + (x[1] + 0.5).powi(2);
            }
            Formula::Mgh33 => {
                let s = mgh33_sum(x);
                for (idx, fi) in f.iter_mut().enumerate() {
                    let i = (idx + 1) as f64;
                    *fi = (i * s - 1.0).powi(2);
                }
            }
            Formula::Mhhm2 => {
                for (fi, (c1, c2)) in f.iter_mut().zip(MHHM2_CENTERS) {
                    *fi = (x[0] - c1).powi(2) + (x[1] - c2).powi(2);
                }
            }
            Formula::Mlf1 => {
                let s = 1.0 + x[0] / 20.0;
                f[0] = s * x[0].sin();
                f[1] = s * x[0].cos();
            }
            Formula::Mlf2 => {
                let (h1, h2) = mlf2_parts(x);
                f[0] = h1.0 / 200.0 - 5.0;
                f[1] = h2.0 / 200.0 - 5.0;
            }
            Formula::Mmr1 => {
                if x[0] <= 0.0 {
                    f.fill(f64::NAN);
                    return;
                }
                f[0] = 1.0 + x[0] * x[0];
                f[1] = mmr1_g(x[1]).0 / x[0];
            }
            Formula::Mop3 => {
                let (d1, d2, _) = mop3_parts(x);
                f[0] = 1.0 + d1 * d1 + d2 * d2;
                f[1] = (x[0] + 3.0).powi(2) + (x[1] + 1.0).powi(2);
            }
            Formula::Pnr => {
                let (a, b) = (x[0], x[1]);
                f[0] = a.powi(4) + b.powi(4) - a * a + b * b - 10.0 * a * b + 0.25 * a + 20.0;
                f[1] = (a - 1.0).powi(2) + b * b;
            }
            Formula::Sp1 => {
                let diff = (x[0] - x[1]).powi(2);
                f[0] = (x[0] - 1.0).powi(2) + diff;
                f[1] = (x[1] - 3.0).powi(2) + diff;
            }
            Formula::Toi4 => {
                f[0] = x[0] * x[0] + x[1] * x[1] + 1.0;
                f[1] = 0.5 * ((x[0] - x[1]).powi(2) + (x[2] - x[3]).powi(2)) + 1.0;
            }
            Formula::Wit(lambda) => {
                let w = Wit::new(x, lambda);
                f[0] = 0.5 * (w.r1 + w.r2 + x[0] - x[1]) + w.bump;
                f[1] = 0.5 * (w.r1 + w.r2 - x[0] + x[1]) + w.bump;
            }
        }
    }

    pub(crate) fn jacobian(self, x: &[f64], jac: &mut Jacobian) {
        match self {
            Formula::Ap2 => {
                jac.set(0, 0, 2.0 * x[0]);
                jac.set(1, 0, 2.0 * (x[0] - 1.0));
            }
            Formula::Ap4 => {
                let (a, b, c) = (x[0], x[1], x[2]);
                jac.row_mut(0).copy_from_slice(&[
                    4.0 * (a - 1.0).powi(3) / 9.0,
                    8.0 * (b - 2.0).powi(3) / 9.0,
                    12.0 * (c - 3.0).powi(3) / 9.0,
                ]);
                let e = ((a + b + c) / 3.0).exp() / 3.0;
                jac.row_mut(1).copy_from_slice(&[e + 2.0 * a, e + 2.0 * b, e + 2.0 * c]);
                jac.row_mut(2).copy_from_slice(&[
                    -3.0 * (-a).exp() / 12.0,
                    -4.0 * (-b).exp() / 12.0,
                    -3.0 * (-c).exp() / 12.0,
                ]);
            }
            Formula::Bk1 => {
                jac.row_mut(0).copy_from_slice(&[2.0 * x[0], 2.0 * x[1]]);
                jac.row_mut(1).copy_from_slice(&[2.0 * (x[0] - 5.0), 2.0 * (x[1] - 5.0)]);
            }
            Formula::Dgo1 => {
                jac.set(0, 0, x[0].cos());
                jac.set(1, 0, (x[0] + 0.7).cos());
            }
            Formula::Dgo2 => {
                jac.set(0, 0, 2.0 * x[0]);
                jac.set(1, 0, x[0] / dgo2_root(x[0]));
            }
            Formula::Far1 => {
                let mut g = [0.0; 2];
                for (row, bumps) in [(0, &FAR1_F1), (1, &FAR1_F2)] {
                    g.fill(0.0);
                    for b in bumps.iter() {
                        b.accumulate_gradient(x, &mut g);
                    }
                    jac.row_mut(row).copy_from_slice(&g);
                }
            }
            Formula::Fds => {
                let n = x.len();
                let nf = n as f64;
                let e = (x.iter().sum::<f64>() / nf).exp() / nf;
                for (idx, &xi) in x.iter().enumerate() {
                    let i = (idx + 1) as f64;
                    jac.set(0, idx, 4.0 * i * (xi - i).powi(3) / (nf * nf));
                    jac.set(1, idx, e + 2.0 * xi);
                    jac.set(2, idx, -i * (nf - i + 1.0) * (-xi).exp() / (nf * (nf + 1.0)));
                }
            }
            Formula::Ff1 => {
                let e1 = (-(x[0] - 1.0).powi(2) - (x[1] + 1.0).powi(2)).exp();
                let e2 = (-(x[0] + 1.0).powi(2) - (x[1] - 1.0).powi(2)).exp();
                jac.row_mut(0)
                    .copy_from_slice(&[2.0 * (x[0] - 1.0) * e1, 2.0 * (x[1] + 1.0) * e1]);
                jac.row_mut(1)
                    .copy_from_slice(&[2.0 * (x[0] + 1.0) * e2, 2.0 * (x[1] - 1.0) * e2]);
            }
            Formula::Hil1 => {
                let (a, b) = hil1_parts(x);
                let deg = 2.0 * PI / 360.0;
                let da = [
                    deg * 40.0 * 2.0 * PI * (2.0 * PI * x[0]).cos(),
                    deg * 25.0 * 2.0 * PI * (2.0 * PI * x[1]).cos(),
                ];
                let db = [-0.5 * 2.0 * PI * (2.0 * PI * x[0]).sin(), 0.0];
                for j in 0..2 {
                    jac.set(0, j, -a.sin() * da[j] * b + a.cos() * db[j]);
                    jac.set(1, j, a.cos() * da[j] * b + a.sin() * db[j]);
                }
            }
            Formula::Jos1 => {
                let n = x.len() as f64;
                for (j, &xj) in x.iter().enumerate() {
                    jac.set(0, j, 2.0 * xj / n);
                    jac.set(1, j, 2.0 * (xj - 2.0) / n);
                }
            }
            Formula::Kw2 => {
                let k = Kw2::new(x);
                jac.row_mut(0).copy_from_slice(&[
                    -3.0 * k.da[0] + 10.0 * k.db[0] + 3.0 * k.dc[0] - 1.0,
                    -3.0 * k.da[1] + 10.0 * k.db[1] + 3.0 * k.dc[1] - 0.5,
                ]);
                jac.row_mut(1).copy_from_slice(&[
                    -3.0 * k.dd[0] + 10.0 * k.de[0] + 3.0 * k.dg[0],
                    -3.0 * k.dd[1] + 10.0 * k.de[1] + 3.0 * k.dg[1],
                ]);
            }
            Formula::Lov1 => {
                jac.row_mut(0).copy_from_slice(&[2.1 * x[0], 1.96 * x[1]]);
                jac.row_mut(1)
                    .copy_from_slice(&[1.98 * (x[0] - 3.0), 2.06 * (x[1] - 2.5)]);
            }
            Formula::Lov3 => {
                jac.row_mut(0).copy_from_slice(&[2.0 * x[0], 2.0 * x[1]]);
                jac.row_mut(1).copy_from_slice(&[2.0 * (x[0] - 6.0), -2.0 * (x[1] + 0.3)]);
            }
            Formula::Lov4 => {
                let (e1, e2) = lov4_bumps(x);
                jac.row_mut(0).copy_from_slice(&[
                    2.0 * x[0] - 8.0 * ((x[0] + 2.0) * e1 + (x[0] - 2.0) * e2),
                    2.0 * x[1] - 8.0 * x[1] * (e1 + e2),
                ]);
                jac.row_mut(1).copy_from_slice(&[2.0 * (x[0] - 6.0), 2.0 * (x[1] + 0.5)]);
            }
            Formula::Mgh33 => {
                let s = mgh33_sum(x);
                for i in 0..jac.nrows() {
                    let fi = (i + 1) as f64;
                    let scale = 2.0 * (fi * s - 1.0) * fi;
                    for (j, g) in jac.row_mut(i).iter_mut().enumerate() {
                        *g = scale * (j + 1) as f64;
                    }
                }
            }
            Formula::Mhhm2 => {
                for (i, (c1, c2)) in MHHM2_CENTERS.iter().enumerate() {
                    jac.row_mut(i)
                        .copy_from_slice(&[2.0 * (x[0] - c1), 2.0 * (x[1] - c2)]);
                }
            }
            Formula::Mlf1 => {
                let s = 1.0 + x[0] / 20.0;
                let (sin, cos) = x[0].sin_cos();
                jac.set(0, 0, sin / 20.0 + s * cos);
                jac.set(1, 0, cos / 20.0 - s * sin);
            }
            Formula::Mlf2 => {
                let (h1, h2) = mlf2_parts(x);
                jac.row_mut(0).copy_from_slice(&[h1.1[0] / 200.0, h1.1[1] / 200.0]);
                jac.row_mut(1).copy_from_slice(&[h2.1[0] / 200.0, h2.1[1] / 200.0]);
            }
            Formula::Mmr1 => {
                if x[0] <= 0.0 {
                    jac.fill(f64::NAN);
                    return;
                }
                let (g, dg) = mmr1_g(x[1]);
                jac.row_mut(0).copy_from_slice(&[2.0 * x[0], 0.0]);
                jac.row_mut(1).copy_from_slice(&[-g / (x[0] * x[0]), dg / x[0]]);
            }
            Formula::Mop3 => {
                let (d1, d2, db) = mop3_parts(x);
                for j in 0..2 {
                    jac.set(0, j, -2.0 * d1 * db[0][j] - 2.0 * d2 * db[1][j]);
                }
                jac.row_mut(1)
                    .copy_from_slice(&[2.0 * (x[0] + 3.0), 2.0 * (x[1] + 1.0)]);
            }
            Formula::Pnr => {
                let (a, b) = (x[0], x[1]);
                jac.row_mut(0).copy_from_slice(&[
                    4.0 * a.powi(3) - 2.0 * a - 10.0 * b + 0.25,
                    4.0 * b.powi(3) + 2.0 * b - 10.0 * a,
                ]);
                jac.row_mut(1).copy_from_slice(&[2.0 * (a - 1.0), 2.0 * b]);
            }
            Formula::Sp1 => {
                let d = 2.0 * (x[0] - x[1]);
                jac.row_mut(0).copy_from_slice(&[2.0 * (x[0] - 1.0) + d, -d]);
                jac.row_mut(1).copy_from_slice(&[d, 2.0 * (x[1] - 3.0) - d]);
            }
            Formula::Toi4 => {
                jac.row_mut(0).copy_from_slice(&[2.0 * x[0], 2.0 * x[1], 0.0, 0.0]);
                let (d12, d34) = (x[0] - x[1], x[2] - x[3]);
                jac.row_mut(1).copy_from_slice(&[d12, -d12, d34, -d34]);
            }
            Formula::Wit(lambda) => {
                let w = Wit::new(x, lambda);
                let s = x[0] + x[1];
                let d = x[0] - x[1];
                let dr1 = s / w.r1;
                let dr2 = d / w.r2;
                let dbump = -2.0 * d * w.bump;
                let common = [0.5 * (dr1 + dr2) + dbump, 0.5 * (dr1 - dr2) - dbump];
                jac.row_mut(0).copy_from_slice(&[common[0] + 0.5, common[1] - 0.5]);
                jac.row_mut(1).copy_from_slice(&[common[0] - 0.5, common[1] + 0.5]);
            }
        }
    }
}

fn dgo2_root(x: f64) -> f64 {
    let r = 81.0 - x * x;
    if r > 0.0 {
        r.sqrt()
    } else {
        f64::NAN
    }
}

/// `sign * exp(-scale * ((x1 - c1)^2 + (x2 - c2)^2))`
struct Bump {
    sign: f64,
    scale: f64,
    c: [f64; 2],
}

impl Bump {
    const fn new(sign: f64, scale: f64, c1: f64, c2: f64) -> Self {
        Self {
            sign,
            scale,
            c: [c1, c2],
        }
    }

    fn value(&self, x: &[f64]) -> f64 {
        let r = (x[0] - self.c[0]).powi(2) + (x[1] - self.c[1]).powi(2);
        self.sign * (-self.scale * r).exp()
    }

    fn accumulate_gradient(&self, x: &[f64], g: &mut [f64; 2]) {
        let v = self.value(x);
        g[0] += -2.0 * self.scale * (x[0] - self.c[0]) * v;
        g[1] += -2.0 * self.scale * (x[1] - self.c[1]) * v;
    }
}

const FAR1_F1: [Bump; 5] = [
    Bump::new(-2.0, 15.0, 0.1, 0.0),
    Bump::new(-1.0, 20.0, 0.6, 0.6),
    Bump::new(1.0, 20.0, -0.6, 0.6),
    Bump::new(1.0, 20.0, 0.6, -0.6),
    Bump::new(1.0, 20.0, -0.6, -0.6),
];

const FAR1_F2: [Bump; 5] = [
    Bump::new(2.0, 20.0, 0.0, 0.0),
    Bump::new(1.0, 20.0, 0.4, 0.6),
    Bump::new(-1.0, 20.0, -0.5, 0.7),
    Bump::new(-1.0, 20.0, 0.5, -0.7),
    Bump::new(1.0, 20.0, -0.4, -0.8),
];

const MHHM2_CENTERS: [(f64, f64); 3] = [(0.8, 0.6), (0.85, 0.7), (0.9, 0.6)];

/// Angle (radians) and radius of Hillermeier's problem.
fn hil1_parts(x: &[f64]) -> (f64, f64) {
    let a = 2.0 * PI / 360.0
        * (45.0 + 40.0 * (2.0 * PI * x[0]).sin() + 25.0 * (2.0 * PI * x[1]).sin());
    let b = 1.0 + 0.5 * (2.0 * PI * x[0]).cos();
    (a, b)
}

struct Kw2 {
    a: f64,
    b: f64,
    c: f64,
    d: f64,
    e: f64,
    g: f64,
    da: [f64; 2],
    db: [f64; 2],
    dc: [f64; 2],
    dd: [f64; 2],
    de: [f64; 2],
    dg: [f64; 2],
}

impl Kw2 {
    fn new(x: &[f64]) -> Self {
        let (x1, x2) = (x[0], x[1]);

        let ea = (-x1 * x1 - (x2 + 1.0).powi(2)).exp();
        let a = (1.0 - x1).powi(2) * ea;
        let da = [
            ea * (-2.0 * (1.0 - x1) - 2.0 * x1 * (1.0 - x1).powi(2)),
            ea * (1.0 - x1).powi(2) * (-2.0 * (x2 + 1.0)),
        ];

        let e0 = (-x1 * x1 - x2 * x2).exp();
        let pb = x1 / 5.0 - x1.powi(3) - x2.powi(5);
        let b = pb * e0;
        let db = [
            e0 * (0.2 - 3.0 * x1 * x1 - 2.0 * x1 * pb),
            e0 * (-5.0 * x2.powi(4) - 2.0 * x2 * pb),
        ];

        let c = (-(x1 + 2.0).powi(2) - x2 * x2).exp();
        let dc = [-2.0 * (x1 + 2.0) * c, -2.0 * x2 * c];

        let ed = (-x2 * x2 - (1.0 - x1).powi(2)).exp();
        let d = (1.0 + x2).powi(2) * ed;
        let dd = [
            d * 2.0 * (1.0 - x1),
            ed * (2.0 * (1.0 + x2) - 2.0 * x2 * (1.0 + x2).powi(2)),
        ];

        let pe = -x2 / 5.0 + x2.powi(3) + x1.powi(5);
        let e = pe * e0;
        let de = [
            e0 * (5.0 * x1.powi(4) - 2.0 * x1 * pe),
            e0 * (-0.2 + 3.0 * x2 * x2 - 2.0 * x2 * pe),
        ];

        let g = (-(2.0 - x2).powi(2) - x1 * x1).exp();
        let dg = [-2.0 * x1 * g, 2.0 * (2.0 - x2) * g];

        Self {
            a,
            b,
            c,
            d,
            e,
            g,
            da,
            db,
            dc,
            dd,
            de,
            dg,
        }
    }
}

fn lov4_bumps(x: &[f64]) -> (f64, f64) {
    (
        (-(x[0] + 2.0).powi(2) - x[1] * x[1]).exp(),
        (-(x[0] - 2.0).powi(2) - x[1] * x[1]).exp(),
    )
}

fn mgh33_sum(x: &[f64]) -> f64 {
    x.iter().enumerate().map(|(j, v)| (j + 1) as f64 * v).sum()
}

type ValueGrad = (f64, [f64; 2]);

/// Himmelblau-type sums of MLF2 with their gradients.
fn mlf2_parts(x: &[f64]) -> (ValueGrad, ValueGrad) {
    let (a, b) = (x[0], x[1]);
    let (u1, u2) = (a * a + b - 11.0, a + b * b - 7.0);
    let h1 = (
        u1 * u1 + u2 * u2,
        [4.0 * a * u1 + 2.0 * u2, 2.0 * u1 + 4.0 * b * u2],
    );
    let (w1, w2) = (4.0 * a * a + 2.0 * b - 11.0, 2.0 * a + 4.0 * b * b - 7.0);
    let h2 = (
        w1 * w1 + w2 * w2,
        [16.0 * a * w1 + 4.0 * w2, 4.0 * w1 + 16.0 * b * w2],
    );
    (h1, h2)
}

/// MMR1's bimodal numerator and its derivative.
fn mmr1_g(x2: f64) -> (f64, f64) {
    let u = (x2 - 0.2) / 0.004;
    let w = (x2 - 0.6) / 0.4;
    let eu = (-u * u).exp();
    let ew = (-w * w).exp();
    let g = 2.0 - eu - 0.8 * ew;
    let dg = eu * 2.0 * u / 0.004 + 0.8 * ew * 2.0 * w / 0.4;
    (g, dg)
}

/// Residuals `A1 - B1`, `A2 - B2` of the Poloni problem and the Jacobian of `(B1, B2)`.
fn mop3_parts(x: &[f64]) -> (f64, f64, [[f64; 2]; 2]) {
    let (s1, c1) = 1f64.sin_cos();
    let (s2, c2) = 2f64.sin_cos();
    let a1 = 0.5 * s1 - 2.0 * c1 + s2 - 1.5 * c2;
    let a2 = 1.5 * s1 - c1 + 2.0 * s2 - 0.5 * c2;
    let (sx, cx) = x[0].sin_cos();
    let (sy, cy) = x[1].sin_cos();
    let b1 = 0.5 * sx - 2.0 * cx + sy - 1.5 * cy;
    let b2 = 1.5 * sx - cx + 2.0 * sy - 0.5 * cy;
    let db = [
        [0.5 * cx + 2.0 * sx, cy + 1.5 * sy],
        [1.5 * cx + sx, 2.0 * cy + 0.5 * sy],
    ];
    (a1 - b1, a2 - b2, db)
}

struct Wit {
    r1: f64,
    r2: f64,
    bump: f64,
}

impl Wit {
    fn new(x: &[f64], lambda: f64) -> Self {
        let s = x[0] + x[1];
        let d = x[0] - x[1];
        Self {
            r1: (1.0 + s * s).sqrt(),
            r2: (1.0 + d * d).sqrt(),
            bump: lambda * (-d * d).exp(),
        }
    }
}
