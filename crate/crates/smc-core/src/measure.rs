//! Weight vectors for the two measures, the constraint systems they must
//! satisfy, exponents, and a small local weight search.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MeasureError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("weights are infeasible: {0}")]
    Infeasible(String),
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Exact value of a decimal literal such as `0.15282`, `-3` or `1e-3`.
pub fn parse_decimal(s: &str) -> Option<BigRational> {
    let s = s.trim();
    let (mant, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, mant) = match mant.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mant.strip_prefix('+').unwrap_or(mant)),
    };
    let (int, frac) = mant.split_once('.').unwrap_or((mant, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits: BigInt = format!("0{int}{frac}").parse().ok()?;
    let scale = exp - frac.len() as i32;
    let ten = BigInt::from(10);
    let mut v = BigRational::from_integer(digits);
    if scale >= 0 {
        v *= BigRational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        v /= BigRational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Some(if neg { -v } else { v })
}

pub fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

fn fmt_rat(x: &BigRational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// A constraint value: exact where the row is linear, floating where it
/// contains powers of two.
#[derive(Clone, Debug, PartialEq)]
pub enum Num {
    Exact(BigRational),
    Approx(f64),
}

impl Num {
    pub fn as_f64(&self) -> f64 {
        match self {
            Num::Exact(x) => to_f64(x),
            Num::Approx(x) => *x,
        }
    }
}

impl fmt::Display for Num {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Num::Exact(x) => f.write_str(&fmt_rat(x)),
            Num::Approx(x) => write!(f, "{x:.12}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConstraintRow {
    pub id: String,
    pub lhs: Num,
    pub slack: Num,
    pub ok: bool,
    /// Reported but not part of the feasibility verdict.
    pub informational: bool,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConstraintReport {
    pub rows: Vec<ConstraintRow>,
}

pub const BINDING_SLACK: f64 = 1e-9;

impl ConstraintReport {
    pub fn feasible(&self) -> bool {
        self.rows.iter().all(|r| r.ok || r.informational)
    }

    pub fn violated(&self) -> Vec<&ConstraintRow> {
        self.rows.iter().filter(|r| !r.ok && !r.informational).collect()
    }

    pub fn binding(&self) -> Vec<&ConstraintRow> {
        self.rows.iter().filter(|r| !r.informational && r.slack.as_f64().abs() < BINDING_SLACK).collect()
    }

    pub fn row(&self, id: &str) -> Option<&ConstraintRow> {
        self.rows.iter().find(|r| r.id == id)
    }

    /// `expr ≤ 0`, exact.
    fn le0(&mut self, id: impl Into<String>, expr: BigRational) {
        let ok = !expr.is_positive();
        self.rows.push(ConstraintRow {
            id: id.into(),
            slack: Num::Exact(-&expr),
            lhs: Num::Exact(expr),
            ok,
            informational: false,
        });
    }

    /// `expr < 0`, exact.
    fn lt0(&mut self, id: impl Into<String>, expr: BigRational) {
        let ok = expr.is_negative();
        self.rows.push(ConstraintRow {
            id: id.into(),
            slack: Num::Exact(-&expr),
            lhs: Num::Exact(expr),
            ok,
            informational: false,
        });
    }

    fn eq0(&mut self, id: impl Into<String>, expr: BigRational) {
        let ok = expr.is_zero();
        self.rows.push(ConstraintRow {
            id: id.into(),
            slack: Num::Exact(-expr.abs()),
            lhs: Num::Exact(expr),
            ok,
            informational: false,
        });
    }

    /// `Σ 2^{e_i} ≤ 1`.
    fn pow_sum(&mut self, id: impl Into<String>, exps: &[f64]) {
        let sum: f64 = exps.iter().map(|e| e.exp2()).sum();
        self.rows.push(ConstraintRow {
            id: id.into(),
            lhs: Num::Approx(sum),
            slack: Num::Approx(1.0 - sum),
            ok: sum <= 1.0 + POW_TOL,
            informational: false,
        });
    }

    /// One line per row, in the machine-readable form.
    pub fn lines(&self) -> Vec<String> {
        self.rows
            .iter()
            .map(|r| {
                let tag = if r.informational { " info=true" } else { "" };
                format!("CONSTRAINT {} lhs={} slack={} ok={}{}", r.id, r.lhs, r.slack, r.ok, tag)
            })
            .collect()
    }

    /// Aligned human-readable table.
    pub fn table(&self) -> String {
        let w = self.rows.iter().map(|r| r.id.len()).max().unwrap_or(2).max(2);
        let mut s = format!("{:<w$}  {:>16}  {:>16}  ok\n", "id", "lhs", "slack");
        for r in &self.rows {
            s += &format!(
                "{:<w$}  {:>16.9}  {:>16.9}  {}{}\n",
                r.id,
                r.lhs.as_f64(),
                r.slack.as_f64(),
                r.ok,
                if r.informational { " (info)" } else { "" }
            );
        }
        s
    }
}

/// Rounding slack for the power-sum rows; the published tables are given to
/// five decimals.
pub const POW_TOL: f64 = 1e-12;

// ---------------------------------------------------------------- Max 2-CSP

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CspWeights {
    pub w_s: BigRational,
    pub w2_s: BigRational,
    pub w_r: BigRational,
    pub w_b: BigRational,
    pub w_c: BigRational,
    pub eps: BigRational,
}

impl CspWeights {
    /// w_r is stored as 1/5 with the ε kept separately.
    pub fn published() -> Self {
        CspWeights {
            w_s: rat(7, 10),
            w2_s: rat(3, 5),
            w_r: rat(1, 5),
            w_b: rat(1, 5),
            w_c: rat(1, 10),
            eps: rat(1, 1000),
        }
    }

    pub fn w_d(&self) -> BigRational {
        &self.w_b + BigRational::one()
    }

    pub fn from_text(text: &str) -> Result<Self, MeasureError> {
        let mut w = Self::published();
        for (ln, line) in crate::graph::content_lines(text) {
            let t: Vec<&str> = line.split_whitespace().collect();
            let err = |msg: &str| MeasureError::Parse { line: ln, msg: msg.into() };
            if t.len() != 2 {
                return Err(err("expected `<name> <value>`"));
            }
            let v = parse_decimal(t[1]).ok_or_else(|| err("bad number"))?;
            match t[0] {
                "w_s" => w.w_s = v,
                "w2_s" => w.w2_s = v,
                "w_r" => w.w_r = v,
                "w_b" => w.w_b = v,
                "w_c" => w.w_c = v,
                "eps" => w.eps = v,
                _ => return Err(err("unknown weight name")),
            }
        }
        Ok(w)
    }

    pub fn to_text(&self) -> String {
        let f = |x: &BigRational| format!("{:.6}", to_f64(x));
        format!(
            "w_s {}\nw2_s {}\nw_r {}\nw_b {}\nw_c {}\neps {}\n",
            f(&self.w_s),
            f(&self.w2_s),
            f(&self.w_r),
            f(&self.w_b),
            f(&self.w_c),
            f(&self.eps)
        )
    }

    fn coords(&self) -> Vec<BigRational> {
        vec![self.w_s.clone(), self.w2_s.clone(), self.w_r.clone(), self.w_b.clone(), self.w_c.clone()]
    }

    fn with_coords(&self, c: &[BigRational]) -> Self {
        CspWeights {
            w_s: c[0].clone(),
            w2_s: c[1].clone(),
            w_r: c[2].clone(),
            w_b: c[3].clone(),
            w_c: c[4].clone(),
            eps: self.eps.clone(),
        }
    }
}

fn r1_lhs(w: &CspWeights, eps: &BigRational) -> BigRational {
    &w.w_s * (rat(1, 6) + eps) + &w.w_r * rat(5, 12) - &w.w_r
}

/// All rows in `≤ 0` form. The ε-row is decided in the ε → 0 limit; its
/// value at the supplied ε is reported alongside.
pub fn check_csp(w: &CspWeights) -> ConstraintReport {
    let one = BigRational::one();
    let (ws, w2, wr, wb, wc) = (&w.w_s, &w.w2_s, &w.w_r, &w.w_b, &w.w_c);
    let mut rep = ConstraintReport::default();
    let mut nonneg = BigRational::zero();
    for x in [ws, w2, wr, wb, wc, &w.w_d()] {
        if -x > nonneg {
            nonneg = -x;
        }
    }
    rep.le0("nonneg", nonneg);
    rep.le0("degredL", -wb + wc);
    rep.le0("degredS", -ws + w2);
    rep.le0("degredR1", -wr + wc);
    rep.le0("degredR2", -wr + wb - wc);
    rep.le0("r1", r1_lhs(w, &BigRational::zero()));
    let at_eps = r1_lhs(w, &w.eps);
    rep.rows.push(ConstraintRow {
        id: "r1@eps".into(),
        ok: !at_eps.is_positive(),
        slack: Num::Exact(-&at_eps),
        lhs: Num::Exact(at_eps),
        informational: true,
    });
    rep.le0("2S1", -w2 + ws - wr + wc);
    rep.le0("2S0", -w2 + ws - wr + wb - wc);
    rep.le0("r2", -ws + wr);
    rep.le0("noR2", -ws + wc);
    rep.le0("noR1", -ws + wb - wc);
    rep.le0("r5", &one - ws * rat(2, 1) + w2 - wr);
    rep.le0("red2L0", &one - ws - wr - wb + wc);
    rep.le0("red2L1", &one - ws - wr - wc);
    rep.le0("red2L2", -wr + wb);
    rep.le0("red2R1", &one - ws - wr * rat(2, 1) - wc + wb);
    rep.le0("red2R2", &one - ws - wr * rat(2, 1) + wc);
    rep
}

#[derive(Clone, Debug, PartialEq)]
pub struct Exponent {
    /// Per-vertex exponent of the bound (base r for CSP, base 2 for SC).
    pub exponent: BigRational,
    /// r^exponent, or 2^exponent.
    pub base: f64,
}

pub fn exponent_csp(w: &CspWeights, r: u32) -> Result<Exponent, MeasureError> {
    let rep = check_csp(w);
    if !rep.feasible() {
        return Err(MeasureError::Infeasible(rep.violated()[0].id.clone()));
    }
    Ok(Exponent { base: f64::from(r).powf(to_f64(&w.w_r)), exponent: w.w_r.clone() })
}

// ---------------------------------------------------------------- Set Cover

/// Degree-indexed weight tables; entries for degree ≥ 6 equal entry 6.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScWeights {
    pub w_elt: [BigRational; 7],
    pub w_set: [BigRational; 7],
    /// Indexed by degree 0..=3; entries 0 and 1 are zero.
    pub w_sep: [BigRational; 4],
    pub w_right: [BigRational; 4],
    pub eps: BigRational,
}

fn dec(s: &str) -> BigRational {
    parse_decimal(s).expect("literal")
}

impl ScWeights {
    pub fn published() -> Self {
        let z = BigRational::zero;
        ScWeights {
            w_elt: [z(), z(), dec("0.15384"), dec("0.22732"), dec("0.26684"), dec("0.29023"), dec("0.30019")],
            w_set: [z(), z(), dec("0.16408"), dec("0.24592"), dec("0.29320"), dec("0.30224"), dec("0.30224")],
            w_sep: [z(), z(), dec("0.75630"), dec("0.78943")],
            w_right: [z(), z(), dec("0.15282"), dec("0.22669")],
            eps: rat(1, 100),
        }
    }

    pub fn elt(&self, d: usize) -> &BigRational {
        &self.w_elt[d.min(6)]
    }

    pub fn set(&self, d: usize) -> &BigRational {
        &self.w_set[d.min(6)]
    }

    pub fn sep(&self, d: usize) -> &BigRational {
        &self.w_sep[d.min(3)]
    }

    pub fn right(&self, d: usize) -> &BigRational {
        &self.w_right[d.min(3)]
    }

    /// B = 6 · w_right(3).
    pub fn big_b(&self) -> BigRational {
        &self.w_right[3] * rat(6, 1)
    }

    pub fn d_elt(&self, d: usize) -> BigRational {
        if d == 0 || d > 6 {
            BigRational::zero()
        } else {
            self.elt(d) - self.elt(d - 1)
        }
    }

    pub fn d_set(&self, d: usize) -> BigRational {
        if d == 0 || d > 6 {
            BigRational::zero()
        } else {
            self.set(d) - self.set(d - 1)
        }
    }

    pub fn d_sep(&self, d: usize) -> BigRational {
        if d == 0 || d > 3 {
            BigRational::zero()
        } else {
            self.sep(d) - self.sep(d - 1)
        }
    }

    pub fn d_right(&self, d: usize) -> BigRational {
        if d == 0 || d > 3 {
            BigRational::zero()
        } else {
            self.right(d) - self.right(d - 1)
        }
    }

    /// min over i ∈ {2,3} of Δw_sep(i) and Δw_right(i)/2.
    pub fn delta_deg_dec(&self) -> BigRational {
        [2, 3].iter().flat_map(|&i| [self.d_sep(i), self.d_right(i) / rat(2, 1)]).min().unwrap()
    }

    /// Lines `w_elt <d> <value>`, `w_set`, `w_sep`, `w_right`, or `eps <value>`.
    pub fn from_text(text: &str) -> Result<Self, MeasureError> {
        let mut w = Self::published();
        for (ln, line) in crate::graph::content_lines(text) {
            let t: Vec<&str> = line.split_whitespace().collect();
            let err = |msg: &str| MeasureError::Parse { line: ln, msg: msg.into() };
            if t.len() == 2 && t[0] == "eps" {
                w.eps = parse_decimal(t[1]).ok_or_else(|| err("bad number"))?;
                continue;
            }
            if t.len() != 3 {
                return Err(err("expected `<table> <degree> <value>`"));
            }
            let d: usize = t[1].parse().map_err(|_| err("bad degree"))?;
            let v = parse_decimal(t[2]).ok_or_else(|| err("bad number"))?;
            let slot = match t[0] {
                "w_elt" if d <= 6 => &mut w.w_elt[d],
                "w_set" if d <= 6 => &mut w.w_set[d],
                "w_sep" if d <= 3 => &mut w.w_sep[d],
                "w_right" if d <= 3 => &mut w.w_right[d],
                _ => return Err(err("unknown table or degree out of range")),
            };
            *slot = v;
        }
        Ok(w)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (name, tab) in [
            ("w_elt", &self.w_elt[..]),
            ("w_set", &self.w_set[..]),
            ("w_sep", &self.w_sep[..]),
            ("w_right", &self.w_right[..]),
        ] {
            for (d, v) in tab.iter().enumerate().skip(2) {
                s += &format!("{name} {d} {:.6}\n", to_f64(v));
            }
        }
        s += &format!("eps {}\n", to_f64(&self.eps));
        s
    }

    fn coords(&self) -> Vec<BigRational> {
        let mut c = Vec::new();
        c.extend_from_slice(&self.w_elt[2..]);
        c.extend_from_slice(&self.w_set[2..]);
        c.extend_from_slice(&self.w_sep[2..]);
        c.extend_from_slice(&self.w_right[2..]);
        c
    }

    fn with_coords(&self, c: &[BigRational]) -> Self {
        let mut w = self.clone();
        w.w_elt[2..].clone_from_slice(&c[0..5]);
        w.w_set[2..].clone_from_slice(&c[5..10]);
        w.w_sep[2..].clone_from_slice(&c[10..12]);
        w.w_right[2..].clone_from_slice(&c[12..14]);
        w
    }
}

/// Neighbor-degree classes for the degree-≥4 branching rows: 2..=6, and 7
/// standing for every degree ≥ 7 (same weight as 6, zero Δ).
fn multisets(d: usize, max_class: usize) -> Vec<Vec<usize>> {
    fn rec(d: usize, lo: usize, hi: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == d {
            out.push(cur.clone());
            return;
        }
        for i in lo..=hi {
            cur.push(i);
            rec(d, i, hi, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(d, 2, max_class, &mut Vec::new(), &mut out);
    out
}

/// Worst (largest) power sum of the degree-`d` branching row over all
/// neighbor-degree multisets; `set_branch` selects the set-vertex variant.
pub fn ds4_worst(w: &ScWeights, d: usize, set_branch: bool) -> (f64, Vec<usize>) {
    type Table<'a> = &'a dyn Fn(usize) -> f64;
    let (own, own_d, nb, nb_d): (f64, f64, Table, Table) = if set_branch {
        (to_f64(w.set(d)), to_f64(&w.d_set(d)), &|i| to_f64(w.elt(i)), &|i| to_f64(&w.d_elt(i)))
    } else {
        (to_f64(w.elt(d)), to_f64(&w.d_elt(d)), &|i| to_f64(w.set(i)), &|i| to_f64(&w.d_set(i)))
    };
    // sets branch only when every element is strictly smaller
    let cap = if set_branch { (d - 1).min(7) } else { d.min(7) };
    let mut worst = (f64::NEG_INFINITY, Vec::new());
    for ms in multisets(d, cap) {
        let sum_w: f64 = ms.iter().map(|&i| nb(i)).sum();
        let sum_dw: f64 = ms.iter().map(|&i| nb_d(i)).sum();
        let sum_i1: f64 = ms.iter().map(|&i| (i - 1) as f64).sum();
        let v = (-own - sum_w - own_d * sum_i1).exp2() + (-own - sum_dw).exp2();
        if v > worst.0 {
            worst = (v, ms);
        }
    }
    worst
}

/// Degree range enumerated for the degree-≥4 branching rows.
pub const DS4_MAX_DEGREE: usize = 12;

pub fn check_sc(w: &ScWeights) -> ConstraintReport {
    let mut rep = ConstraintReport::default();
    let two = rat(2, 1);
    let half = rat(1, 2);
    let f = to_f64;

    let mut neg = BigRational::zero();
    for x in w.w_elt.iter().chain(&w.w_set).chain(&w.w_sep).chain(&w.w_right).chain([&w.eps]) {
        if -x > neg {
            neg = -x;
        }
    }
    rep.le0("nonneg", neg);
    for d in 0..2 {
        rep.eq0(format!("w01-elt-{d}"), w.w_elt[d].clone());
        rep.eq0(format!("w01-set-{d}"), w.w_set[d].clone());
    }
    for i in 2..=6 {
        rep.le0(format!("mono-elt-{i}"), -w.d_elt(i));
        rep.le0(format!("mono-set-{i}"), -w.d_set(i));
        rep.le0(format!("concave-elt-{i}"), w.d_elt(i + 1) - w.d_elt(i));
        rep.le0(format!("concave-set-{i}"), w.d_set(i + 1) - w.d_set(i));
    }
    rep.le0("deg-dec-N2-elt", &two * w.d_elt(3) - w.elt(2));
    rep.le0("deg-dec-N2-set", &two * w.d_set(4) - w.set(2));

    for d in 4..=DS4_MAX_DEGREE {
        for (name, set_branch) in [("ds4set", true), ("ds4elt", false)] {
            let (v, ms) = ds4_worst(w, d, set_branch);
            let mut id = format!("{name}-d{d}[");
            id += &ms
                .iter()
                .map(|i| if *i == 7 { "7+".to_string() } else { i.to_string() })
                .collect::<Vec<_>>()
                .join(",");
            id.push(']');
            rep.rows.push(ConstraintRow {
                id,
                lhs: Num::Approx(v),
                slack: Num::Approx(1.0 - v),
                ok: v <= 1.0 + POW_TOL,
                informational: false,
            });
        }
    }

    let delta = w.delta_deg_dec();
    rep.le0("delta-deg-dec", -delta.clone());
    rep.lt0("sep", w.sep(3) - w.right(3) * rat(7, 2));
    for d in 2..=3 {
        rep.le0(format!("no-nb-L-{d}"), -w.sep(d) + w.right(d));
        rep.le0(format!("no-nb-R-{d}"), -w.sep(d) + w.right(d) * &half);
    }
    rep.le0("deg2-in-S", -w.sep(2) + w.sep(3) + (w.right(2) - w.right(3)) * &half);
    rep.le0("imbal-2L-S", -w.sep(3) + w.right(3) * &half);
    rep.le0("2d-sep", &two * w.d_sep(3) - w.sep(2));
    rep.le0("2d-right", &two * w.d_right(3) - w.right(2));

    let (ws3, dws3, dl) = (f(w.sep(3)), f(&w.d_sep(3)), f(&delta));
    let wr = |d: usize| f(w.right(d));
    let dwr = |d: usize| f(&w.d_right(d));
    for dl_ in 2..=3 {
        for dr in 2..=3 {
            rep.pow_sum(
                format!("s-nb-bal-{dl_}{dr}"),
                &[
                    -ws3 - dws3 - 0.5 * (dwr(dr) + dwr(dl_)),
                    -2.0 * ws3 - 0.5 * (wr(dr) + wr(dl_)) - (dr + dl_) as f64 * dl,
                ],
            );
        }
    }
    for dr in 2..=3 {
        rep.pow_sum(format!("s-nb-imbal-{dr}"), &[-ws3 - dws3 - dwr(dr), -2.0 * ws3 - wr(dr) - dr as f64 * dl]);
    }
    for d1 in 2..=3 {
        for d2 in d1..=3 {
            for d3 in d2..=3 {
                let ds = [d1, d2, d3];
                let sdw: f64 = ds.iter().map(|&d| dwr(d)).sum();
                let sw: f64 = ds.iter().map(|&d| wr(d)).sum();
                let extra = (d1 + d2 + d3 - 3) as f64 * dl;
                rep.pow_sum(format!("branch2-{d1}{d2}{d3}"), &[-ws3 - 0.5 * sdw, -ws3 - 0.5 * sw - extra]);
            }
        }
    }
    for d in 2..=3 {
        let e = -ws3 - wr(2) - dwr(d);
        rep.pow_sum(format!("imbal-2L-{d}"), &[e, e]);
    }
    rep.lt0("bridge-elt-3", w.right(3) - w.elt(3));
    rep.lt0("bridge-set-3", w.right(3) - w.set(3));
    for i in 0..=2 {
        rep.le0(format!("bridge-elt-{i}"), w.right(i) - w.elt(i));
        rep.le0(format!("bridge-set-{i}"), w.right(i) - w.set(i));
    }
    rep
}

/// For each d in 13..=20 the degree-d rows are no worse than the degree-12
/// rows (pairs `(d, holds)`).
pub fn ds4_tail_dominated(w: &ScWeights) -> Vec<(usize, bool)> {
    let base_set = ds4_worst(w, DS4_MAX_DEGREE, true).0;
    let base_elt = ds4_worst(w, DS4_MAX_DEGREE, false).0;
    (13..=20)
        .map(|d| {
            let ok = ds4_worst(w, d, true).0 <= base_set + 1e-15 && ds4_worst(w, d, false).0 <= base_elt + 1e-15;
            (d, ok)
        })
        .collect()
}

pub fn exponent_sc(w: &ScWeights) -> Result<Exponent, MeasureError> {
    let rep = check_sc(w);
    if !rep.feasible() {
        return Err(MeasureError::Infeasible(rep.violated()[0].id.clone()));
    }
    let e = w.elt(6) + w.set(6);
    Ok(Exponent { base: f(&e).exp2(), exponent: e })
}

fn f(x: &BigRational) -> f64 {
    to_f64(x)
}

// ---------------------------------------------------------------- search

#[derive(Clone, Debug, PartialEq, Eq)]
#[allow(clippy::large_enum_variant)]
pub enum System {
    Csp(CspWeights),
    Sc(ScWeights),
}

impl System {
    pub fn objective(&self) -> BigRational {
        match self {
            System::Csp(w) => w.w_r.clone(),
            System::Sc(w) => w.elt(6) + w.set(6),
        }
    }

    pub fn report(&self) -> ConstraintReport {
        match self {
            System::Csp(w) => check_csp(w),
            System::Sc(w) => check_sc(w),
        }
    }

    fn coords(&self) -> Vec<BigRational> {
        match self {
            System::Csp(w) => w.coords(),
            System::Sc(w) => w.coords(),
        }
    }

    fn with_coords(&self, c: &[BigRational]) -> Self {
        match self {
            System::Csp(w) => System::Csp(w.with_coords(c)),
            System::Sc(w) => System::Sc(w.with_coords(c)),
        }
    }
}

/// Deterministic pattern search: single-coordinate and pairwise moves with
/// a halving step, accepting only feasible strict improvements. `budget`
/// bounds the number of candidate evaluations.
pub fn improve_weights(start: &System, budget: usize) -> Result<System, MeasureError> {
    let rep = start.report();
    if !rep.feasible() {
        return Err(MeasureError::Infeasible(rep.violated()[0].id.clone()));
    }
    let mut cur = start.clone();
    let mut obj = cur.objective();
    let mut step = rat(1, 20);
    let min_step = rat(1, 1_000_000);
    let mut evals = 0;
    let n = cur.coords().len();
    while evals < budget && step >= min_step {
        let mut improved = false;
        let mut moves: Vec<Vec<(usize, i32)>> = Vec::new();
        for i in 0..n {
            moves.push(vec![(i, -1)]);
            moves.push(vec![(i, 1)]);
        }
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    moves.push(vec![(i, -1), (j, -1)]);
                    moves.push(vec![(i, -1), (j, 1)]);
                }
            }
        }
        for mv in moves {
            if evals >= budget {
                break;
            }
            let mut c = cur.coords();
            for &(i, s) in &mv {
                c[i] = &c[i] + &step * rat(s as i64, 1);
            }
            if c.iter().any(|x| x.is_negative()) {
                continue;
            }
            let cand = cur.with_coords(&c);
            evals += 1;
            let o = cand.objective();
            if o < obj && cand.report().feasible() {
                cur = cand;
                obj = o;
                improved = true;
                break;
            }
        }
        if !improved {
            step /= rat(2, 1);
        }
    }
    Ok(cur)
}
