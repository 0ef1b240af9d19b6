//! Convex piecewise-quadratic functions of one variable.
//!
//! These are the value functions carried by the single-unit dynamic program:
//! adding a stage cost, restricting to output bounds, and taking the minimum
//! over a ramping window all map convex functions to convex functions.

use std::fmt;

/// `q2 * x^2 + q1 * x + q0` on `[lo, hi]`, in absolute coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Piece {
    pub lo: f64,
    pub hi: f64,
    pub q2: f64,
    pub q1: f64,
    pub q0: f64,
}

impl Piece {
    pub fn eval(&self, x: f64) -> f64 {
        (self.q2 * x + self.q1) * x + self.q0
    }

    pub fn slope(&self, x: f64) -> f64 {
        2.0 * self.q2 * x + self.q1
    }

    /// The same quadratic re-expressed as a function of `x` where it used to
    /// be evaluated at `x + d`.
    fn shifted(&self, d: f64, lo: f64, hi: f64) -> Piece {
        Piece {
            lo,
            hi,
            q2: self.q2,
            q1: 2.0 * self.q2 * d + self.q1,
            q0: (self.q2 * d + self.q1) * d + self.q0,
        }
    }

    /// Leftmost minimiser on `[lo, hi]`. Valid for any sign of `q2`.
    fn min_on(&self, lo: f64, hi: f64) -> (f64, f64) {
        let mut best = (lo, self.eval(lo));
        let mut consider = |x: f64| {
            let v = self.eval(x);
            if v < best.1 {
                best = (x, v);
            }
        };
        if self.q2 > 0.0 {
            let vx = -self.q1 / (2.0 * self.q2);
            if vx > lo && vx < hi {
                consider(vx);
            }
        }
        consider(hi);
        best
    }
}

/// Errors from combining functions whose domains do not meet.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DisjointDomains;

impl fmt::Display for DisjointDomains {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("piecewise quadratic domains do not intersect")
    }
}

impl std::error::Error for DisjointDomains {}

/// A continuous piecewise-quadratic function on a closed interval.
///
/// Pieces are ordered and contiguous. A single degenerate piece (`lo == hi`)
/// represents a function defined at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseQuadratic {
    pieces: Vec<Piece>,
}

impl PiecewiseQuadratic {
    pub fn quadratic(lo: f64, hi: f64, q2: f64, q1: f64, q0: f64) -> Self {
        assert!(lo <= hi, "empty domain [{lo}, {hi}]");
        PiecewiseQuadratic {
            pieces: vec![Piece { lo, hi, q2, q1, q0 }],
        }
    }

    pub fn constant(lo: f64, hi: f64, value: f64) -> Self {
        Self::quadratic(lo, hi, 0.0, 0.0, value)
    }

    /// Builds from explicit pieces; they must be non-empty, ordered and contiguous.
    pub fn from_pieces(pieces: Vec<Piece>) -> Self {
        assert!(!pieces.is_empty(), "a function needs at least one piece");
        for w in pieces.windows(2) {
            assert!(
                w[0].hi == w[1].lo,
                "pieces must be contiguous ({} vs {})",
                w[0].hi,
                w[1].lo
            );
        }
        PiecewiseQuadratic { pieces }.normalized()
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.pieces[0].lo, self.pieces[self.pieces.len() - 1].hi)
    }

    fn piece_at(&self, x: f64) -> Option<&Piece> {
        let (lo, hi) = self.domain();
        if x < lo || x > hi {
            return None;
        }
        let i = self.pieces.partition_point(|p| p.hi < x);
        self.pieces.get(i.min(self.pieces.len() - 1))
    }

    /// Value at `x`, or `None` outside the domain.
    pub fn eval(&self, x: f64) -> Option<f64> {
        self.piece_at(x).map(|p| p.eval(x))
    }

    /// Drops zero-width pieces unless the whole domain is a single point.
    fn normalized(mut self) -> Self {
        if self.pieces.iter().any(|p| p.hi > p.lo) {
            self.pieces.retain(|p| p.hi > p.lo);
        } else {
            self.pieces.truncate(1);
        }
        self
    }

    pub fn add_quadratic(&mut self, q2: f64, q1: f64, q0: f64) {
        for p in &mut self.pieces {
            p.q2 += q2;
            p.q1 += q1;
            p.q0 += q0;
        }
    }

    pub fn add_constant(&mut self, c: f64) {
        self.add_quadratic(0.0, 0.0, c);
    }

    /// Pointwise sum on the intersection of the domains.
    pub fn add(&self, other: &PiecewiseQuadratic) -> Result<PiecewiseQuadratic, DisjointDomains> {
        let (alo, ahi) = self.domain();
        let (blo, bhi) = other.domain();
        let lo = alo.max(blo);
        let hi = ahi.min(bhi);
        if lo > hi {
            return Err(DisjointDomains);
        }
        if lo == hi {
            let v = self.eval(lo).unwrap_or(0.0) + other.eval(lo).unwrap_or(0.0);
            return Ok(Self::constant(lo, lo, v));
        }
        let mut out = Vec::with_capacity(self.pieces.len() + other.pieces.len());
        let (mut i, mut j) = (0, 0);
        let mut cur = lo;
        while cur < hi {
            while self.pieces[i].hi <= cur && i + 1 < self.pieces.len() {
                i += 1;
            }
            while other.pieces[j].hi <= cur && j + 1 < other.pieces.len() {
                j += 1;
            }
            let (a, b) = (&self.pieces[i], &other.pieces[j]);
            let end = a.hi.min(b.hi).min(hi);
            out.push(Piece {
                lo: cur,
                hi: end,
                q2: a.q2 + b.q2,
                q1: a.q1 + b.q1,
                q0: a.q0 + b.q0,
            });
            if end <= cur {
                break;
            }
            cur = end;
        }
        Ok(PiecewiseQuadratic { pieces: out }.normalized())
    }

    /// Restriction to `[lo, hi]`, or `None` if nothing remains.
    pub fn restrict(&self, lo: f64, hi: f64) -> Option<PiecewiseQuadratic> {
        let (dlo, dhi) = self.domain();
        let lo = lo.max(dlo);
        let hi = hi.min(dhi);
        if lo > hi {
            return None;
        }
        let pieces: Vec<Piece> = self
            .pieces
            .iter()
            .filter(|p| p.hi >= lo && p.lo <= hi)
            .map(|p| Piece {
                lo: p.lo.max(lo),
                hi: p.hi.min(hi),
                ..*p
            })
            .collect();
        if pieces.is_empty() {
            return None;
        }
        Some(PiecewiseQuadratic { pieces }.normalized())
    }

    /// Leftmost global minimiser and the minimum value.
    pub fn argmin(&self) -> (f64, f64) {
        let mut best = (f64::NAN, f64::INFINITY);
        for p in &self.pieces {
            let (x, v) = p.min_on(p.lo, p.hi);
            if v < best.1 {
                best = (x, v);
            }
        }
        best
    }

    /// Leftmost minimiser over `[lo, hi]` intersected with the domain.
    pub fn min_on_interval(&self, lo: f64, hi: f64) -> Option<(f64, f64)> {
        let mut best: Option<(f64, f64)> = None;
        for p in &self.pieces {
            let a = p.lo.max(lo);
            let b = p.hi.min(hi);
            if a > b {
                continue;
            }
            let (x, v) = p.min_on(a, b);
            if best.is_none_or(|(_, bv)| v < bv) {
                best = Some((x, v));
            }
        }
        best
    }

    /// `g(x) = min { f(y) : y in [x - up, x + down] ∩ dom f }` for convex `f`.
    ///
    /// The result lives on `[lo - down, hi + up]`: the decreasing branch of `f`
    /// moves left by `down`, the increasing branch moves right by `up`, and
    /// the minimum value fills the gap.
    pub fn min_over_window(&self, down: f64, up: f64) -> PiecewiseQuadratic {
        assert!(down >= 0.0 && up >= 0.0, "window must be non-negative");
        let (m, v) = self.argmin();
        let mut out = Vec::with_capacity(self.pieces.len() + 2);
        for p in self.pieces.iter().filter(|p| p.lo < m) {
            let hi = p.hi.min(m);
            out.push(p.shifted(down, p.lo - down, hi - down));
        }
        out.push(Piece {
            lo: m - down,
            hi: m + up,
            q2: 0.0,
            q1: 0.0,
            q0: v,
        });
        for p in self.pieces.iter().filter(|p| p.hi > m) {
            let lo = p.lo.max(m);
            out.push(p.shifted(-up, lo + up, p.hi + up));
        }
        PiecewiseQuadratic { pieces: out }.normalized()
    }

    /// True when continuity holds at every joint and the slope never
    /// decreases, both to `tol` relative.
    pub fn is_convex(&self, tol: f64) -> bool {
        if self.pieces.iter().any(|p| p.q2 < -tol) {
            return false;
        }
        self.pieces.windows(2).all(|w| {
            let x = w[0].hi;
            let (va, vb) = (w[0].eval(x), w[1].eval(x));
            let scale = 1.0 + va.abs().max(vb.abs());
            let (sa, sb) = (w[0].slope(x), w[1].slope(x));
            let sscale = 1.0 + sa.abs().max(sb.abs()) + x.abs() * (w[0].q2 + w[1].q2);
            (va - vb).abs() <= tol * scale && sb >= sa - tol * sscale
        })
    }

    /// True when `self >= other - tol * (1 + |other|)` everywhere on
    /// `dom self`, which must lie inside `dom other`.
    pub fn dominated_by(&self, other: &PiecewiseQuadratic, tol: f64) -> bool {
        let (lo, hi) = self.domain();
        let (olo, ohi) = other.domain();
        if lo < olo || hi > ohi {
            return false;
        }
        let mut cuts: Vec<f64> = self
            .pieces
            .iter()
            .chain(&other.pieces)
            .flat_map(|p| [p.lo, p.hi])
            .filter(|&x| x >= lo && x <= hi)
            .collect();
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        if cuts.len() == 1 {
            cuts.push(cuts[0]);
        }
        for seg in cuts.windows(2) {
            let (a, b) = (seg[0], seg[1]);
            let mid = 0.5 * (a + b);
            let (Some(p), Some(o)) = (self.piece_at(mid), other.piece_at(mid)) else {
                return false;
            };
            let diff = Piece {
                lo: a,
                hi: b,
                q2: p.q2 - o.q2,
                q1: p.q1 - o.q1,
                q0: p.q0 - o.q0,
            };
            let (x, d) = diff.min_on(a, b);
            if d < -tol * (1.0 + o.eval(x).abs()) {
                return false;
            }
        }
        true
    }
}
