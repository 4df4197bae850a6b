use serde::{Deserialize, Serialize};

/// Axis-aligned rectangle in the `(lambda2, theta)` plane.
///
/// Corners follow the labelling `t0 = (hi, lo)`, `t1 = (lo, lo)`,
/// `t2 = (lo, hi)`, `t3 = (hi, hi)` in `(lambda2, theta)`, and the boundary
/// loop runs `t0 -> t1 -> t2 -> t3 -> t0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DomainRect {
    pub lambda2: (f64, f64),
    pub theta: (f64, f64),
}

impl DomainRect {
    /// `[lambda1 - eta, lambda1 + eta] x [0, pi]`.
    pub fn around(lambda1: f64, eta: f64) -> Self {
        DomainRect { lambda2: (lambda1 - eta, lambda1 + eta), theta: (0.0, std::f64::consts::PI) }
    }

    pub fn corners(&self) -> [(f64, f64); 4] {
        let ((a0, a1), (b0, b1)) = (self.lambda2, self.theta);
        [(a1, b0), (a0, b0), (a0, b1), (a1, b1)]
    }

    /// Closed boundary polyline through the four corners (the first corner is
    /// not repeated).
    pub fn boundary(&self) -> Vec<(f64, f64)> {
        self.corners().to_vec()
    }

    pub fn center(&self) -> (f64, f64) {
        (0.5 * (self.lambda2.0 + self.lambda2.1), 0.5 * (self.theta.0 + self.theta.1))
    }

    pub fn widths(&self) -> (f64, f64) {
        (self.lambda2.1 - self.lambda2.0, self.theta.1 - self.theta.0)
    }

    pub fn diameter(&self) -> f64 {
        let (a, b) = self.widths();
        a.hypot(b)
    }

    pub fn contains(&self, (a, b): (f64, f64)) -> bool {
        a >= self.lambda2.0 && a <= self.lambda2.1 && b >= self.theta.0 && b <= self.theta.1
    }

    /// Four children split at fractions `fa`, `fb` of the widths, indexed
    /// `0 = (low, low)`, `1 = (high, low)`, `2 = (low, high)`, `3 = (high, high)`.
    pub fn split(&self, fa: f64, fb: f64) -> [DomainRect; 4] {
        let am = self.lambda2.0 + fa * (self.lambda2.1 - self.lambda2.0);
        let bm = self.theta.0 + fb * (self.theta.1 - self.theta.0);
        let (la, ha) = ((self.lambda2.0, am), (am, self.lambda2.1));
        let (lb, hb) = ((self.theta.0, bm), (bm, self.theta.1));
        [
            DomainRect { lambda2: la, theta: lb },
            DomainRect { lambda2: ha, theta: lb },
            DomainRect { lambda2: la, theta: hb },
            DomainRect { lambda2: ha, theta: hb },
        ]
    }

    /// Same rectangle re-centred at `c`.
    pub fn recentered(&self, c: (f64, f64)) -> Self {
        let (wa, wb) = self.widths();
        DomainRect { lambda2: (c.0 - wa / 2.0, c.0 + wa / 2.0), theta: (c.1 - wb / 2.0, c.1 + wb / 2.0) }
    }
}
