use std::collections::HashSet;

use rand::Rng;

use crate::{Error, Limits, Result};

/// A hypothesis class searched by brute force. For a given point set the
/// class proposes finitely many hypotheses; the labelings they produce are
/// the labelings the class is credited with.
pub trait HypothesisClass {
    type Point;
    type Hypothesis;

    fn name(&self) -> &str;

    /// Candidate hypotheses covering the labelings of `points` the class can
    /// produce.
    fn candidates(&self, points: &[Self::Point]) -> Vec<Self::Hypothesis>;

    fn label(&self, hypothesis: &Self::Hypothesis, point: &Self::Point) -> bool;
}

/// Every labeling (bit `i` = label of point `i`) produced by a candidate.
pub fn realized_labelings<C: HypothesisClass>(class: &C, points: &[C::Point]) -> HashSet<u32> {
    class
        .candidates(points)
        .iter()
        .map(|h| {
            points
                .iter()
                .enumerate()
                .fold(0u32, |mask, (i, p)| mask | (u32::from(class.label(h, p)) << i))
        })
        .collect()
}

/// Whether the class realizes all `2^m` labelings of the points.
pub fn shatters<C: HypothesisClass>(class: &C, points: &[C::Point], limits: &Limits) -> Result<bool> {
    let m = points.len();
    if m > limits.shatter_points.min(31) {
        return Err(Error::cap(
            format!("{} labelings of {m} points", class.name()),
            Some(1u128 << m.min(127)),
            1u128 << limits.shatter_points.min(31),
        ));
    }
    Ok(realized_labelings(class, points).len() == 1usize << m)
}

/// Largest `m <= max_m` for which some point set from `generator(m)` is
/// shattered; 0 when none is.
pub fn vc_dimension<C, G>(class: &C, mut generator: G, max_m: usize, limits: &Limits) -> Result<usize>
where
    C: HypothesisClass,
    G: FnMut(usize) -> Vec<Vec<C::Point>>,
{
    if max_m > limits.vc_points {
        return Err(Error::cap(
            format!("VC dimension search up to {max_m} points"),
            Some(max_m as u128),
            limits.vc_points as u128,
        ));
    }
    let mut best = 0;
    for m in 1..=max_m {
        for set in generator(m) {
            if set.len() == m && shatters(class, &set, limits)? {
                best = m;
                break;
            }
        }
    }
    Ok(best)
}

/// Point sets for [`vc_dimension`] on the plane: uniform draws from the unit
/// square, plus the vertices of a regular polygon.
pub fn random_point_sets<R: Rng>(rng: &mut R, per_size: usize) -> impl FnMut(usize) -> Vec<Vec<[f64; 2]>> + '_ {
    move |m| {
        let polygon: Vec<[f64; 2]> = (0..m)
            .map(|k| {
                let t = std::f64::consts::TAU * k as f64 / m as f64;
                [t.cos(), t.sin()]
            })
            .collect();
        let mut sets = vec![polygon];
        for _ in 0..per_size {
            sets.push((0..m).map(|_| [rng.gen::<f64>(), rng.gen::<f64>()]).collect());
        }
        sets
    }
}

/// `normal . x > offset`. A zero normal gives a constant hypothesis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Halfspace {
    pub normal: [f64; 2],
    pub offset: f64,
}

/// Half-planes in two dimensions.
///
/// Candidates are lines through each pair of points, nudged off both points
/// together (a small shift either way) or rotated slightly about their
/// midpoint (splitting the pair either way), in both orientations, plus the
/// two constant labelings. Every candidate is a genuine half-plane, so no
/// labeling is ever over-credited; for points in general position every
/// separable labeling is found, because a separating line can be slid and
/// turned until it passes through two of the points.
#[derive(Debug, Clone, Copy, Default)]
pub struct Halfspaces2d;

fn dot(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

impl HypothesisClass for Halfspaces2d {
    type Point = [f64; 2];
    type Hypothesis = Halfspace;

    fn name(&self) -> &str {
        "halfspaces-2d"
    }

    fn candidates(&self, points: &[[f64; 2]]) -> Vec<Halfspace> {
        let mut out = vec![
            Halfspace {
                normal: [0.0, 0.0],
                offset: -1.0,
            },
            Halfspace {
                normal: [0.0, 0.0],
                offset: 1.0,
            },
        ];
        for i in 0..points.len() {
            for j in i + 1..points.len() {
                let (p, q) = (points[i], points[j]);
                let d = [q[0] - p[0], q[1] - p[1]];
                let len = dot(d, d).sqrt();
                if len == 0.0 {
                    continue;
                }
                let normal = [-d[1] / len, d[0] / len];
                let mid = [(p[0] + q[0]) / 2.0, (p[1] + q[1]) / 2.0];
                let mut gap = f64::INFINITY;
                let mut reach = len;
                for r in points {
                    let rel = [r[0] - mid[0], r[1] - mid[1]];
                    let side = dot(normal, rel).abs();
                    if side > 1e-12 {
                        gap = gap.min(side);
                    }
                    reach = reach.max(dot(rel, rel).sqrt());
                }
                if !gap.is_finite() {
                    gap = len;
                }
                let shift = gap / 4.0;
                let angle = gap / (4.0 * reach);
                for sign in [1.0, -1.0] {
                    for (turn, nudge) in [(0.0, shift), (0.0, -shift), (angle, 0.0), (-angle, 0.0)] {
                        let (s, c) = f64::sin_cos(turn);
                        let n = [normal[0] * c - normal[1] * s, normal[0] * s + normal[1] * c];
                        let n = [sign * n[0], sign * n[1]];
                        out.push(Halfspace {
                            normal: n,
                            offset: dot(n, mid) + sign * nudge,
                        });
                    }
                }
            }
        }
        out
    }

    fn label(&self, h: &Halfspace, x: &[f64; 2]) -> bool {
        dot(h.normal, *x) > h.offset
    }
}

/// Only the two constant hypotheses.
#[derive(Debug, Clone, Copy, Default)]
pub struct ConstantClass;

impl HypothesisClass for ConstantClass {
    type Point = f64;
    type Hypothesis = bool;

    fn name(&self) -> &str {
        "constants"
    }

    fn candidates(&self, _: &[f64]) -> Vec<bool> {
        vec![false, true]
    }

    fn label(&self, h: &bool, _: &f64) -> bool {
        *h
    }
}

/// Rays `x >= t` on the real line, one direction only.
#[derive(Debug, Clone, Copy, Default)]
pub struct Thresholds;

impl HypothesisClass for Thresholds {
    type Point = f64;
    type Hypothesis = f64;

    fn name(&self) -> &str {
        "thresholds"
    }

    fn candidates(&self, points: &[f64]) -> Vec<f64> {
        points.iter().copied().chain([f64::INFINITY]).collect()
    }

    fn label(&self, t: &f64, x: &f64) -> bool {
        x >= t
    }
}
