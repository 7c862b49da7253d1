//! Element-pair integrals of the Green kernel and its normal derivative.
//!
//! Self pairs are integrated in `(ρ, v)` coordinates with `ρ = |s − t|`;
//! adjacent pairs use a Duffy split at the shared node. In both cases the
//! `ln ρ` part of the kernel is moved onto a log-weighted Gauss rule.

use super::{AssemblyError, Result};
use crate::geometry::Contour;
use crate::specfun::{kernel_split, quad_rule, KernelSplit, QuadKind};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

type C64 = Complex64;
const CZERO: C64 = C64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadratureOptions {
    /// Points per direction for self pairs (both the log and the regular rule).
    pub singular: usize,
    /// Points per direction for pairs sharing a node.
    pub adjacent: usize,
    pub near: usize,
    pub far: usize,
    /// Pairs whose midpoints are closer than `near_factor · max(h_e, h_f)` use the near rule.
    pub near_factor: f64,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self { singular: 8, adjacent: 16, near: 12, far: 6, near_factor: 2.5 }
    }
}

impl QuadratureOptions {
    /// Same options with the singular and adjacent orders doubled.
    pub fn refined(self) -> Self {
        Self { singular: 2 * self.singular, adjacent: 2 * self.adjacent, ..self }
    }
}

pub(crate) struct Rules {
    self_gl: Vec<(f64, f64)>,
    self_log: Vec<(f64, f64)>,
    adj_gl: Vec<(f64, f64)>,
    adj_log: Vec<(f64, f64)>,
    near: Vec<(f64, f64)>,
    far: Vec<(f64, f64)>,
    near_factor: f64,
}

impl Rules {
    pub(crate) fn new(opts: &QuadratureOptions) -> Result<Self> {
        let gl = |n| -> Result<Vec<(f64, f64)>> { Ok(quad_rule(QuadKind::GaussLegendre, n)?.unit_interval()) };
        let lg = |n| -> Result<Vec<(f64, f64)>> { Ok(quad_rule(QuadKind::GaussLog, n)?.unit_interval()) };
        if !(opts.near_factor >= 0.0) {
            return Err(AssemblyError::Usage(format!("near_factor must be non-negative, got {}", opts.near_factor)));
        }
        Ok(Self {
            self_gl: gl(opts.singular)?,
            self_log: lg(opts.singular)?,
            adj_gl: gl(opts.adjacent)?,
            adj_log: lg(opts.adjacent)?,
            near: gl(opts.near)?,
            far: gl(opts.far)?,
            near_factor: opts.near_factor,
        })
    }
}

/// Local integrals for an element pair `(e, f)`, `x` on `e` and `y` on `f`,
/// with P1 shape functions `φ_0 = 1 − s`, `φ_1 = s`.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct PairIntegrals {
    /// `∫∫ G φ_a(x) φ_b(y)`
    pub g: [[C64; 2]; 2],
    /// `∫∫ G`
    pub g0: C64,
    /// `∫∫ φ_a(x) φ_b(y) n_e·∇_y G`
    pub q_ef: [[C64; 2]; 2],
    /// `∫∫ φ_b(y) φ_a(x) n_f·∇_x G`, indexed `[b][a]`
    pub q_fe: [[C64; 2]; 2],
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub(crate) enum PairKind {
    Same,
    Adjacent { s_shared: u8, t_shared: u8 },
    Near,
    Far,
}

pub(crate) fn classify(contour: &Contour, e: usize, f: usize, rules: &Rules) -> PairKind {
    if e == f {
        return PairKind::Same;
    }
    let (ee, ff) = (contour.elements()[e], contour.elements()[f]);
    if ee[1] == ff[0] {
        return PairKind::Adjacent { s_shared: 1, t_shared: 0 };
    }
    if ee[0] == ff[1] {
        return PairKind::Adjacent { s_shared: 0, t_shared: 1 };
    }
    let (a, b) = (contour.midpoint(e), contour.midpoint(f));
    let dist = (a[0] - b[0]).hypot(a[1] - b[1]);
    if dist < rules.near_factor * contour.length(e).max(contour.length(f)) {
        PairKind::Near
    } else {
        PairKind::Far
    }
}

struct Accum<'a> {
    contour: &'a Contour,
    e: usize,
    f: usize,
    ne: [f64; 2],
    nf: [f64; 2],
    with_q: bool,
    out: PairIntegrals,
}

impl Accum<'_> {
    #[inline]
    fn geometry(&self, s: f64, t: f64) -> ([f64; 2], f64) {
        let x = self.contour.point(self.e, s);
        let y = self.contour.point(self.f, t);
        let d = [y[0] - x[0], y[1] - x[1]];
        (d, d[0].hypot(d[1]))
    }

    #[inline]
    fn add(&mut self, s: f64, t: f64, d: [f64; 2], w: f64, gval: C64, kval: C64) {
        let pe = [1.0 - s, s];
        let pf = [1.0 - t, t];
        let o = &mut self.out;
        let wg = gval * w;
        o.g0 += wg;
        for a in 0..2 {
            for b in 0..2 {
                o.g[a][b] += wg * (pe[a] * pf[b]);
            }
        }
        if self.with_q {
            let wk = kval * w;
            let qe = self.ne[0] * d[0] + self.ne[1] * d[1];
            let qf = -(self.nf[0] * d[0] + self.nf[1] * d[1]);
            for a in 0..2 {
                for b in 0..2 {
                    let p = pe[a] * pf[b];
                    o.q_ef[a][b] += wk * (qe * p);
                    o.q_fe[b][a] += wk * (qf * p);
                }
            }
        }
    }
}

pub(crate) fn pair_integrals(contour: &Contour, k: f64, e: usize, f: usize, rules: &Rules) -> PairIntegrals {
    let kind = classify(contour, e, f, rules);
    let (he, hf) = (contour.length(e), contour.length(f));
    let mut acc = Accum {
        contour,
        e,
        f,
        ne: contour.normal(e),
        nf: contour.normal(f),
        with_q: kind != PairKind::Same,
        out: PairIntegrals::default(),
    };
    match kind {
        PairKind::Same => {
            let h2 = he * he;
            for &(rho, wr) in &rules.self_gl {
                let ks = kernel_split(k, he * rho);
                let gval = ks.g - ks.g_log * rho.ln();
                for &(v, wv) in &rules.self_gl {
                    let w = wr * wv * (1.0 - rho) * h2;
                    let s = (1.0 - rho) * v + rho;
                    let t = (1.0 - rho) * v;
                    acc.add(s, t, [0.0; 2], w, gval, CZERO);
                    acc.add(t, s, [0.0; 2], w, gval, CZERO);
                }
            }
            for &(rho, wl) in &rules.self_log {
                let ks = kernel_split(k, he * rho);
                let gval = C64::new(-ks.g_log, 0.0);
                for &(v, wv) in &rules.self_gl {
                    let w = wl * wv * (1.0 - rho) * h2;
                    let s = (1.0 - rho) * v + rho;
                    let t = (1.0 - rho) * v;
                    acc.add(s, t, [0.0; 2], w, gval, CZERO);
                    acc.add(t, s, [0.0; 2], w, gval, CZERO);
                }
            }
            // Exact symmetry of the self block under a ↔ b and s ↔ 1 − s.
            let g = &mut acc.out.g;
            let diag = 0.5 * (g[0][0] + g[1][1]);
            let off = 0.5 * (g[0][1] + g[1][0]);
            *g = [[diag, off], [off, diag]];
        }
        PairKind::Adjacent { s_shared, t_shared } => {
            let map = |shared: u8, sigma: f64| if shared == 1 { 1.0 - sigma } else { sigma };
            let hh = he * hf;
            for &(w_, ww) in &rules.adj_gl {
                for tri in 0..2 {
                    let (se, sf) = if tri == 0 { (1.0, w_) } else { (w_, 1.0) };
                    for &(u, wu) in &rules.adj_gl {
                        let (s, t) = (map(s_shared, u * se), map(t_shared, u * sf));
                        let (d, r) = acc.geometry(s, t);
                        let ks: KernelSplit = kernel_split(k, r);
                        let lu = u.ln();
                        let w = wu * ww * u * hh;
                        acc.add(s, t, d, w, ks.g - ks.g_log * lu, ks.dg_over_r - ks.dg_over_r_log * lu);
                    }
                    for &(u, wl) in &rules.adj_log {
                        let (s, t) = (map(s_shared, u * se), map(t_shared, u * sf));
                        let (d, r) = acc.geometry(s, t);
                        let ks = kernel_split(k, r);
                        let w = wl * ww * u * hh;
                        acc.add(s, t, d, w, C64::new(-ks.g_log, 0.0), C64::new(-ks.dg_over_r_log, 0.0));
                    }
                }
            }
        }
        PairKind::Near | PairKind::Far => {
            let rule = if kind == PairKind::Near { &rules.near } else { &rules.far };
            let hh = he * hf;
            for &(s, ws) in rule {
                for &(t, wt) in rule {
                    let (d, r) = acc.geometry(s, t);
                    let ks = kernel_split(k, r);
                    acc.add(s, t, d, ws * wt * hh, ks.g, ks.dg_over_r);
                }
            }
        }
    }
    acc.out
}
