//! Piecewise-linear circle homeomorphisms with exact rational data.
//!
//! A homeomorphism is stored through a lift `F: R -> R` with
//! `F(x + 1) = F(x) + 1`, given by breakpoints `b_0 < ... < b_{k-1}` in
//! `[0, 1)` and values `v_i = F(b_i)`; `F` is linear between consecutive
//! breakpoints and from `b_{k-1}` to `b_0 + 1`. The canonical form keeps only
//! the singular points (a rotation keeps the single breakpoint `0`) and shifts
//! the lift so that `v_0` lies in `[0, 1)`.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Q = BigRational;

/// Growth profiling aborts above this many breakpoints in a power.
pub const MAX_BREAKPOINTS: usize = 1 << 16;
/// Growth profiling aborts above this many bits in any numerator or
/// denominator of a power.
pub const MAX_RATIONAL_BITS: u64 = 1 << 16;

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidHomeo(msg.into())
}

/// Parses `"p/q"` or `"p"`.
pub fn parse_rational(s: &str) -> Result<Q> {
    let q = Q::from_str(s.trim()).map_err(|_| invalid(format!("not a rational: `{s}`")))?;
    Ok(q)
}

pub fn rational(p: i64, q: i64) -> Q {
    Q::new(BigInt::from(p), BigInt::from(q))
}

fn frac(x: &Q) -> Q {
    x - x.floor()
}

#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "HomeoJson", into = "HomeoJson")]
pub struct PlHomeo {
    breakpoints: Vec<Q>,
    values: Vec<Q>,
}

/// Wire form: `{"breakpoints": ["0", "1/3"], "values": ["0", "2/3"]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HomeoJson {
    pub breakpoints: Vec<String>,
    pub values: Vec<String>,
}

impl fmt::Debug for PlHomeo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("PlHomeo[")?;
        for (i, (b, v)) in self.breakpoints.iter().zip(&self.values).enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{b} -> {v}")?;
        }
        f.write_str("]")
    }
}

impl TryFrom<HomeoJson> for PlHomeo {
    type Error = Error;

    fn try_from(json: HomeoJson) -> Result<Self> {
        let b = json
            .breakpoints
            .iter()
            .map(|s| parse_rational(s))
            .collect::<Result<Vec<_>>>()?;
        let v = json
            .values
            .iter()
            .map(|s| parse_rational(s))
            .collect::<Result<Vec<_>>>()?;
        PlHomeo::new(b, v)
    }
}

impl From<PlHomeo> for HomeoJson {
    fn from(h: PlHomeo) -> Self {
        HomeoJson {
            breakpoints: h.breakpoints.iter().map(ToString::to_string).collect(),
            values: h.values.iter().map(ToString::to_string).collect(),
        }
    }
}

impl PlHomeo {
    /// Validates breakpoints (strictly increasing in `[0, 1)`) and values
    /// (strictly increasing, spanning less than 1), then normalises.
    pub fn new(breakpoints: Vec<Q>, values: Vec<Q>) -> Result<Self> {
        if breakpoints.is_empty() {
            return Err(invalid("at least one breakpoint is required"));
        }
        if breakpoints.len() != values.len() {
            return Err(invalid(format!(
                "{} breakpoints but {} values",
                breakpoints.len(),
                values.len()
            )));
        }
        let (zero, one) = (Q::zero(), Q::one());
        if breakpoints.iter().any(|b| b < &zero || b >= &one) {
            return Err(invalid("breakpoints must lie in [0, 1)"));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("breakpoints must be strictly increasing"));
        }
        if values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("values must be strictly increasing"));
        }
        if values[values.len() - 1] >= &values[0] + &one {
            return Err(invalid("values must lie in a window of length less than 1"));
        }
        Ok(Self::canonical(breakpoints, values))
    }

    /// Builds the map through the given lift points, which must define an
    /// orientation-preserving lift (after reducing abscissae mod 1).
    pub fn from_points(points: Vec<(Q, Q)>) -> Result<Self> {
        let mut reduced: Vec<(Q, Q)> = points
            .into_iter()
            .map(|(x, y)| {
                let m = x.floor();
                (&x - &m, y - m)
            })
            .collect();
        reduced.sort_by(|a, b| a.0.cmp(&b.0));
        reduced.dedup_by(|a, b| a.0 == b.0 && a.1 == b.1);
        let (b, v): (Vec<Q>, Vec<Q>) = reduced.into_iter().unzip();
        Self::new(b, v)
    }

    /// Drops points with equal one-sided slopes and normalises the lift.
    fn canonical(b: Vec<Q>, v: Vec<Q>) -> Self {
        let k = b.len();
        let one = Q::one();
        let slope_out = |i: usize| -> Q {
            if i + 1 < k {
                (&v[i + 1] - &v[i]) / (&b[i + 1] - &b[i])
            } else {
                (&v[0] + &one - &v[i]) / (&b[0] + &one - &b[i])
            }
        };
        let out: Vec<Q> = (0..k).map(slope_out).collect();
        let keep: Vec<usize> = (0..k).filter(|&i| out[(i + k - 1) % k] != out[i]).collect();
        let (breakpoints, mut values) = if keep.is_empty() {
            // rotation: F(x) = x + (v_0 - b_0)
            (vec![Q::zero()], vec![&v[0] - &b[0]])
        } else {
            (
                keep.iter().map(|&i| b[i].clone()).collect(),
                keep.iter().map(|&i| v[i].clone()).collect::<Vec<_>>(),
            )
        };
        let shift = values[0].floor();
        for x in &mut values {
            *x -= &shift;
        }
        PlHomeo {
            breakpoints,
            values,
        }
    }

    pub fn identity() -> Self {
        Self::rotation(Q::zero())
    }

    /// Rigid rotation `x -> x + c`.
    pub fn rotation(c: Q) -> Self {
        Self::canonical(vec![Q::zero()], vec![c])
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> HomeoJson {
        HomeoJson::from(self.clone())
    }

    pub fn breakpoints(&self) -> &[Q] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[Q] {
        &self.values
    }

    pub fn is_rotation(&self) -> bool {
        self.breakpoints.len() == 1 && self.slopes()[0].is_one()
    }

    pub fn is_identity(&self) -> bool {
        self.is_rotation() && self.values[0].is_zero()
    }

    /// Lift points `(x_i, y_i)` bounding the linear pieces: the breakpoints
    /// followed by `(b_0 + 1, v_0 + 1)`.
    fn node(&self, i: usize) -> (Q, Q) {
        let k = self.breakpoints.len();
        if i < k {
            (self.breakpoints[i].clone(), self.values[i].clone())
        } else {
            let one = Q::one();
            (&self.breakpoints[0] + &one, &self.values[0] + &one)
        }
    }

    /// Slope of piece `i`, from breakpoint `i` to the next one.
    pub fn slopes(&self) -> Vec<Q> {
        (0..self.breakpoints.len())
            .map(|i| {
                let ((x0, y0), (x1, y1)) = (self.node(i), self.node(i + 1));
                (y1 - y0) / (x1 - x0)
            })
            .collect()
    }

    /// Piece index containing `y` in `[b_0, b_0 + 1)`.
    fn piece(&self, y: &Q) -> usize {
        self.breakpoints.partition_point(|b| b <= y) - 1
    }

    /// Value of the lift at any rational `x`.
    pub fn eval(&self, x: &Q) -> Q {
        let m = (x - &self.breakpoints[0]).floor();
        let y = x - &m;
        let i = self.piece(&y);
        let ((x0, y0), (x1, y1)) = (self.node(i), self.node(i + 1));
        &y0 + (&y - &x0) * (y1 - &y0) / (x1 - x0) + m
    }

    /// The circle map: `eval` reduced into `[0, 1)`.
    pub fn apply(&self, x: &Q) -> Q {
        frac(&self.eval(x))
    }

    /// Left and right slopes at `x`.
    pub fn one_sided_slopes(&self, x: &Q) -> (Q, Q) {
        let slopes = self.slopes();
        let k = slopes.len();
        let m = (x - &self.breakpoints[0]).floor();
        let y = x - m;
        let i = self.piece(&y);
        let right = slopes[i].clone();
        let left = if y == self.breakpoints[i] {
            slopes[(i + k - 1) % k].clone()
        } else {
            right.clone()
        };
        (left, right)
    }

    pub fn inverse(&self) -> Self {
        let points = self
            .values
            .iter()
            .cloned()
            .zip(self.breakpoints.iter().cloned())
            .collect();
        Self::from_points(points).expect("inverse of a valid homeomorphism")
    }

    /// `self ∘ g`.
    pub fn compose(&self, g: &PlHomeo) -> Self {
        let g_inv = g.inverse();
        let mut xs: BTreeSet<Q> = g.breakpoints.iter().cloned().collect();
        xs.extend(self.breakpoints.iter().map(|b| frac(&g_inv.eval(b))));
        let points = xs
            .into_iter()
            .map(|x| {
                let y = self.eval(&g.eval(&x));
                (x, y)
            })
            .collect();
        Self::from_points(points).expect("composition of valid homeomorphisms")
    }

    pub fn power(&self, n: usize) -> Self {
        let mut p = Self::identity();
        for _ in 0..n {
            p = self.compose(&p);
        }
        p
    }

    pub fn conjugate_by(&self, h: &PlHomeo) -> Self {
        h.compose(self).compose(&h.inverse())
    }

    /// Largest bit length among all numerators and denominators.
    pub fn max_bits(&self) -> u64 {
        self.breakpoints
            .iter()
            .chain(&self.values)
            .map(|q| q.numer().bits().max(q.denom().bits()))
            .max()
            .unwrap_or(0)
    }
}

/// Points where the left and right slopes differ, sorted in `[0, 1)`.
pub fn sing(g: &PlHomeo) -> Vec<Q> {
    if g.is_rotation() {
        Vec::new()
    } else {
        g.breakpoints.clone()
    }
}

/// Symbolic evaluation of `d(o, g o) = |S △ gS|` for `S = S^1 × {1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitDistance {
    pub distance: usize,
    /// Points `y` with `(y, 1)` in `S \ gS`.
    pub s_minus_gs: Vec<Q>,
    /// Points `g(x) , g'(x-)/g'(x+)` of `gS \ S`.
    pub gs_minus_s: Vec<(Q, Q)>,
}

/// `2 |Sing(g)|`, cross-checked against both halves of `S △ gS` computed
/// from the action `g (x, r) = (g(x), g'(x-) r / g'(x+))`.
pub fn orbit_distance(g: &PlHomeo) -> Result<OrbitDistance> {
    let singular = sing(g);
    // gS \ S: images of (x, 1) whose second coordinate is not 1
    let mut gs_minus_s = Vec::new();
    for x in &singular {
        let (left, right) = g.one_sided_slopes(x);
        let r = left / right;
        if !r.is_one() {
            gs_minus_s.push((g.apply(x), r));
        }
    }
    gs_minus_s.sort();
    // S \ gS: points (y, 1) whose preimage g^{-1}(y, 1) leaves S, that is
    // the singular points of g^{-1}
    let s_minus_gs = sing(&g.inverse());
    let images: BTreeSet<Q> = gs_minus_s.iter().map(|(y, _)| y.clone()).collect();
    let expected: BTreeSet<Q> = s_minus_gs.iter().cloned().collect();
    if gs_minus_s.len() != singular.len() || images != expected {
        return Err(Error::Assertion(format!(
            "symmetric difference mismatch: |Sing(g)| = {}, |gS \\ S| = {}, |S \\ gS| = {}",
            singular.len(),
            gs_minus_s.len(),
            s_minus_gs.len()
        )));
    }
    Ok(OrbitDistance {
        distance: 2 * singular.len(),
        s_minus_gs,
        gs_minus_s,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Growth {
    Bounded,
    Linear,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GrowthReport {
    pub n_max: usize,
    /// `#Sing(g^n)` for `n = 1..=n_max`.
    pub sequence: Vec<usize>,
    pub classification: Growth,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<u64>,
}

impl GrowthReport {
    /// `s(n)` for `n >= 1`.
    pub fn s(&self, n: usize) -> usize {
        self.sequence[n - 1]
    }
}

/// `round(num / den)` for `den > 0`, halves rounded up.
fn round_div(num: i64, den: i64) -> i64 {
    (2 * num + den).div_euclid(2 * den)
}

/// Classifies a sequence `s(1..=n_max)`.
///
/// Bounded when `s` is constant on the last quarter of the sample;
/// otherwise `K = round(2 (s(n_max) - s(h)) / (n_max - h))` with
/// `h = ceil(n_max / 2)`. An estimate rounding to `K <= 0` means the sequence
/// does not grow (for instance it is periodic) and is also reported bounded.
pub fn classify_growth(sequence: &[usize]) -> (Growth, Option<u64>) {
    let n_max = sequence.len();
    let tail = (n_max / 4).max(1);
    let last = &sequence[n_max - tail..];
    if last.iter().all(|&s| s == last[0]) {
        return (Growth::Bounded, None);
    }
    let h = n_max.div_ceil(2);
    let rise = sequence[n_max - 1] as i64 - sequence[h - 1] as i64;
    let k = round_div(2 * rise, (n_max - h) as i64);
    if k <= 0 {
        (Growth::Bounded, None)
    } else {
        (Growth::Linear, Some(k as u64))
    }
}

/// Computes `#Sing(g^n)` for `n = 1..=n_max` by exact composition and
/// classifies the growth.
pub fn growth_profile(g: &PlHomeo, n_max: usize) -> Result<GrowthReport> {
    if n_max < 8 {
        return Err(Error::InvalidInput("n_max must be at least 8".into()));
    }
    let mut sequence = Vec::with_capacity(n_max);
    let mut p = g.clone();
    for n in 1..=n_max {
        if n > 1 {
            p = g.compose(&p);
        }
        if p.breakpoints.len() > MAX_BREAKPOINTS {
            return Err(Error::ResourceLimit(format!(
                "g^{n} has {} breakpoints (limit {MAX_BREAKPOINTS})",
                p.breakpoints.len()
            )));
        }
        let bits = p.max_bits();
        if bits > MAX_RATIONAL_BITS {
            return Err(Error::ResourceLimit(format!(
                "g^{n} has {bits}-bit rationals (limit {MAX_RATIONAL_BITS})"
            )));
        }
        sequence.push(sing(&p).len());
    }
    let (classification, k) = classify_growth(&sequence);
    Ok(GrowthReport {
        n_max,
        sequence,
        classification,
        k,
    })
}

/// Random element with at most `max_breakpoints` breakpoints; every
/// breakpoint and value has numerator and denominator at most
/// `max_denominator` (values up to an integer shift).
pub fn random_homeo(rng: &mut impl Rng, max_breakpoints: usize, max_denominator: i64) -> PlHomeo {
    let k = rng.gen_range(1..=max_breakpoints.max(1));
    let b: Vec<Q> = distinct_unit_rationals(rng, k, max_denominator);
    let u: Vec<Q> = distinct_unit_rationals(rng, k, max_denominator);
    let r = rng.gen_range(0..k);
    let v: Vec<Q> = (0..k)
        .map(|i| {
            let j = (i + r) % k;
            if i + r >= k {
                &u[j] + Q::one()
            } else {
                u[j].clone()
            }
        })
        .collect();
    PlHomeo::new(b, v).expect("random data is a valid homeomorphism")
}

/// `k` distinct rationals in `[0, 1)` with denominators at most `max_den`,
/// sorted.
fn distinct_unit_rationals(rng: &mut impl Rng, k: usize, max_den: i64) -> Vec<Q> {
    let mut set = BTreeSet::new();
    while set.len() < k {
        let q = rng.gen_range(1..=max_den);
        let p = rng.gen_range(0..q);
        set.insert(rational(p, q));
    }
    set.into_iter().collect()
}

/// Deterministic sample of random elements.
pub fn random_homeos(seed: u64, count: usize, max_breakpoints: usize, max_denominator: i64) -> Vec<PlHomeo> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| random_homeo(&mut rng, max_breakpoints, max_denominator))
        .collect()
}

/// Whether numerator and denominator of `q` are at most `bound` in absolute value.
pub fn is_small(q: &Q, bound: i64) -> bool {
    q.numer().abs() <= BigInt::from(bound) && q.denom() <= &BigInt::from(bound)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(p: i64, d: i64) -> Q {
        rational(p, d)
    }

    fn two_piece() -> PlHomeo {
        PlHomeo::new(vec![q(0, 1), q(1, 3)], vec![q(0, 1), q(2, 3)]).unwrap()
    }

    fn bump() -> PlHomeo {
        PlHomeo::new(
            vec![q(1, 4), q(1, 2), q(3, 4)],
            vec![q(1, 4), q(5, 8), q(3, 4)],
        )
        .unwrap()
    }

    /// Independent count of `#Sing(g^n)` from the raw pieces of `g`: the
    /// candidates are the preimages of breakpoints under `g^j`, `j < n`, and
    /// one-sided slopes follow the chain rule along the forward orbit.
    fn oracle_sequence(g: &PlHomeo, n_max: usize) -> Vec<usize> {
        let pts: Vec<(Q, Q)> = (0..=g.breakpoints.len()).map(|i| g.node(i)).collect();
        let slope = |i: usize| (&pts[i + 1].1 - &pts[i].1) / (&pts[i + 1].0 - &pts[i].0);
        let k = g.breakpoints.len();
        // forward map on [0,1) with one-sided slopes at x
        let step = |x: &Q| -> (Q, Q, Q) {
            let mut y = x.clone();
            let mut shift = Q::zero();
            while y < pts[0].0 {
                y += Q::one();
                shift -= Q::one();
            }
            let i = (0..k).rev().find(|&i| pts[i].0 <= y).unwrap();
            let val = &pts[i].1 + (&y - &pts[i].0) * slope(i) + shift;
            let right = slope(i);
            let left = if y == pts[i].0 { slope((i + k - 1) % k) } else { right.clone() };
            (frac(&val), left, right)
        };
        // inverse map on [0,1) by searching the pieces' images
        let back = |y: &Q| -> Q {
            for m in -2..=2 {
                let target = y + Q::from_integer(BigInt::from(m));
                for i in 0..k {
                    if pts[i].1 <= target && target < pts[i + 1].1 {
                        return frac(&(&pts[i].0 + (&target - &pts[i].1) / slope(i)));
                    }
                }
            }
            unreachable!()
        };
        let breaks: Vec<Q> = g.breakpoints.clone();
        let mut candidates: BTreeSet<Q> = BTreeSet::new();
        let mut layer: Vec<Q> = breaks.clone();
        let mut out = Vec::new();
        for n in 1..=n_max {
            candidates.extend(layer.iter().cloned());
            let count = candidates
                .iter()
                .filter(|x| {
                    let (mut l, mut r) = (Q::one(), Q::one());
                    let mut y = (*x).clone();
                    for _ in 0..n {
                        let (next, sl, sr) = step(&y);
                        l *= sl;
                        r *= sr;
                        y = next;
                    }
                    l != r
                })
                .count();
            out.push(count);
            layer = layer.iter().map(&back).collect();
        }
        out
    }

    #[test]
    fn parse_and_validate() {
        let g = PlHomeo::from_json_str(r#"{"breakpoints":["0","1/3"],"values":["0","2/3"]}"#)
            .unwrap();
        assert_eq!(g, two_piece());
        assert_eq!(g.slopes(), [q(2, 1), q(1, 2)]);
        let bad = [
            r#"{"breakpoints":["0","1/3"],"values":["0"]}"#,
            r#"{"breakpoints":["1/3","0"],"values":["0","2/3"]}"#,
            r#"{"breakpoints":["0","1"],"values":["0","2/3"]}"#,
            r#"{"breakpoints":["0","1/2"],"values":["0","1"]}"#,
            r#"{"breakpoints":["0","1/2"],"values":["1/2","0"]}"#,
            r#"{"breakpoints":["x"],"values":["0"]}"#,
            r#"{"breakpoints":[],"values":[]}"#,
        ];
        for text in bad {
            assert!(PlHomeo::from_json_str(text).is_err(), "{text}");
        }
    }

    #[test]
    fn canonical_form_prunes_and_normalises() {
        let r = PlHomeo::new(vec![q(1, 5), q(1, 2)], vec![q(1, 5) + q(9, 4), q(1, 2) + q(9, 4)])
            .unwrap();
        assert!(r.is_rotation());
        assert_eq!((r.breakpoints(), r.values()), (&[q(0, 1)][..], &[q(1, 4)][..]));
        assert_eq!(serde_json::to_string(&r).unwrap(), r#"{"breakpoints":["0"],"values":["1/4"]}"#);
    }

    #[test]
    fn composition_examples() {
        let g = two_piece();
        assert_eq!(PlHomeo::identity().compose(&g), g);
        assert_eq!(g.compose(&PlHomeo::identity()), g);
        let quarter = PlHomeo::rotation(q(1, 4));
        assert!(quarter.power(4).is_identity());
        assert!(!quarter.power(3).is_identity());
        let g2 = g.compose(&g);
        let slopes: BTreeSet<Q> = g2.slopes().into_iter().collect();
        assert_eq!(slopes, [q(1, 4), q(1, 1), q(4, 1)].into_iter().collect());
        assert_eq!(sing(&g2), [q(0, 1), q(1, 6), q(1, 3)]);
        assert!(g.compose(&g.inverse()).is_identity());
    }

    #[test]
    fn sing_and_orbit_distance_examples() {
        assert!(sing(&PlHomeo::rotation(q(3, 7))).is_empty());
        let g = two_piece();
        assert_eq!(sing(&g), [q(0, 1), q(1, 3)]);
        assert!(sing(&g.compose(&g.inverse())).is_empty());
        assert_eq!(orbit_distance(&PlHomeo::identity()).unwrap().distance, 0);
        assert_eq!(orbit_distance(&PlHomeo::rotation(q(1, 9))).unwrap().distance, 0);
        let d = orbit_distance(&g).unwrap();
        assert_eq!(d.distance, 4);
        assert_eq!(d.s_minus_gs, [q(0, 1), q(2, 3)]);
        assert_eq!(d.gs_minus_s, [(q(0, 1), q(1, 4)), (q(2, 3), q(4, 1))]);
    }

    #[test]
    fn eval_and_slopes() {
        let b = bump();
        assert_eq!(b.eval(&q(1, 8)), q(1, 8));
        assert_eq!(b.eval(&q(3, 8)), q(1, 4) + q(3, 2) * q(1, 8));
        assert_eq!(b.eval(&q(-7, 8)), q(-7, 8));
        assert_eq!(b.eval(&q(9, 2)), q(9, 2) + q(1, 8));
        assert_eq!(b.one_sided_slopes(&q(1, 2)), (q(3, 2), q(1, 2)));
        assert_eq!(b.one_sided_slopes(&q(1, 4)), (q(1, 1), q(3, 2)));
        assert_eq!(b.one_sided_slopes(&q(0, 1)), (q(1, 1), q(1, 1)));
    }

    #[test]
    fn growth_of_fixtures_matches_oracle() {
        let rot = growth_profile(&PlHomeo::rotation(q(1, 3)), 16).unwrap();
        assert_eq!(rot.classification, Growth::Bounded);
        assert!(rot.sequence.iter().all(|&s| s == 0));

        // the slope (2, 1/2) map: s(n) = n + 1
        let g = two_piece();
        let report = growth_profile(&g, 16).unwrap();
        assert_eq!(report.sequence, oracle_sequence(&g, 16));
        assert_eq!(report.sequence, (2..=17).collect::<Vec<_>>());
        assert_eq!((report.classification, report.k), (Growth::Linear, Some(2)));

        // a single bump: s(n) = n + 2
        let b = bump();
        let report = growth_profile(&b, 12).unwrap();
        assert_eq!(report.sequence, oracle_sequence(&b, 12));
        assert_eq!(report.sequence, (3..=14).collect::<Vec<_>>());
    }

    #[test]
    fn periodic_sequences_are_bounded() {
        assert_eq!(classify_growth(&[2, 0, 0, 2, 0, 0, 2, 0, 0, 2, 0, 0]).0, Growth::Bounded);
        assert_eq!(classify_growth(&[4; 10]), (Growth::Bounded, None));
        assert_eq!(classify_growth(&(1..=16).collect::<Vec<_>>()), (Growth::Linear, Some(2)));
        assert!(growth_profile(&PlHomeo::identity(), 7).is_err());
    }

    #[test]
    fn finite_order_element_is_bounded() {
        // conjugate of a rotation by a bump: order 4, singular points come and go
        let g = PlHomeo::rotation(q(1, 4)).conjugate_by(&bump());
        assert!(g.power(4).is_identity());
        let report = growth_profile(&g, 16).unwrap();
        assert_eq!(report.sequence, oracle_sequence(&g, 16));
        assert_eq!(report.classification, Growth::Bounded);
    }

    #[test]
    fn random_data_respects_bounds() {
        for g in random_homeos(3, 20, 8, 100) {
            assert!(g.breakpoints().len() <= 8);
            assert!(g.breakpoints().iter().all(|b| is_small(b, 100)));
        }
    }

    fn arb_homeo() -> impl Strategy<Value = PlHomeo> {
        any::<u64>().prop_map(|seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            random_homeo(&mut rng, 5, 30)
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn associativity(f in arb_homeo(), g in arb_homeo(), h in arb_homeo()) {
            prop_assert_eq!(f.compose(&g).compose(&h), f.compose(&g.compose(&h)));
        }

        #[test]
        fn inverse_laws(g in arb_homeo()) {
            prop_assert!(g.compose(&g.inverse()).is_identity());
            prop_assert!(g.inverse().compose(&g).is_identity());
            prop_assert_eq!(g.inverse().inverse(), g.clone());
        }

        #[test]
        fn sing_of_inverse_is_image_of_sing(g in arb_homeo()) {
            let mut image: Vec<Q> = sing(&g).iter().map(|x| g.apply(x)).collect();
            image.sort();
            prop_assert_eq!(sing(&g.inverse()), image);
        }

        #[test]
        fn orbit_distance_is_symmetric(g in arb_homeo()) {
            prop_assert_eq!(
                orbit_distance(&g).unwrap().distance,
                orbit_distance(&g.inverse()).unwrap().distance
            );
        }

        #[test]
        fn rotation_conjugation_preserves_sing(g in arb_homeo(), p in 0i64..40) {
            let r = PlHomeo::rotation(rational(p, 40));
            prop_assert_eq!(sing(&g.conjugate_by(&r)).len(), sing(&g).len());
        }

        #[test]
        fn subadditivity(f in arb_homeo(), g in arb_homeo()) {
            prop_assert!(sing(&f.compose(&g)).len() <= sing(&f).len() + sing(&g).len());
        }

        #[test]
        fn eval_is_a_lift(g in arb_homeo(), p in -50i64..50) {
            let x = rational(p, 7);
            prop_assert_eq!(g.eval(&(&x + Q::one())), g.eval(&x) + Q::one());
            prop_assert_eq!(g.inverse().apply(&g.eval(&x)), frac(&x));
        }

        #[test]
        fn json_round_trip(g in arb_homeo()) {
            let text = serde_json::to_string(&g).unwrap();
            prop_assert_eq!(PlHomeo::from_json_str(&text).unwrap(), g);
        }
    }
}
