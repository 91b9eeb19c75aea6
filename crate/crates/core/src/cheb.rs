//! Piecewise Chebyshev interpolation on equal panels.

use crate::error::Result;

#[derive(Debug, Clone)]
pub(crate) struct PiecewiseChebyshev {
    lo: f64,
    width: f64,
    /// Coefficients per panel, lowest degree first.
    coeffs: Vec<Vec<f64>>,
}

impl PiecewiseChebyshev {
    /// Interpolates `f` on `[lo, hi]` with panels no wider than `max_width`
    /// and `nodes` first-kind Chebyshev nodes per panel.
    pub(crate) fn build<F: FnMut(f64) -> Result<f64>>(
        mut f: F,
        lo: f64,
        hi: f64,
        max_width: f64,
        nodes: usize,
    ) -> Result<Self> {
        let panels = (((hi - lo) / max_width).ceil() as usize).max(1);
        let width = (hi - lo) / panels as f64;
        let n = nodes as f64;
        let cosines: Vec<f64> = (0..nodes).map(|j| ((j as f64 + 0.5) * std::f64::consts::PI / n).cos()).collect();
        let mut coeffs = Vec::with_capacity(panels);
        for p in 0..panels {
            let a = lo + p as f64 * width;
            let mid = a + 0.5 * width;
            let vals = cosines.iter().map(|c| f(mid + 0.5 * width * c)).collect::<Result<Vec<f64>>>()?;
            let c: Vec<f64> = (0..nodes)
                .map(|k| {
                    let s: f64 = vals
                        .iter()
                        .enumerate()
                        .map(|(j, v)| v * ((k as f64) * (j as f64 + 0.5) * std::f64::consts::PI / n).cos())
                        .sum();
                    s * if k == 0 { 1.0 } else { 2.0 } / n
                })
                .collect();
            coeffs.push(c);
        }
        Ok(Self { lo, width, coeffs })
    }

    #[cfg(test)]
    pub(crate) fn hi(&self) -> f64 {
        self.lo + self.width * self.coeffs.len() as f64
    }

    /// Value at `x`, which must lie in `[lo, hi]`.
    pub(crate) fn eval(&self, x: f64) -> f64 {
        let p = (((x - self.lo) / self.width) as usize).min(self.coeffs.len() - 1);
        let mid = self.lo + (p as f64 + 0.5) * self.width;
        let u = 2.0 * (x - mid) / self.width;
        // Clenshaw
        let c = &self.coeffs[p];
        let (mut b1, mut b2) = (0.0, 0.0);
        for &ck in c[1..].iter().rev() {
            let b0 = 2.0 * u * b1 - b2 + ck;
            b2 = b1;
            b1 = b0;
        }
        u * b1 - b2 + c[0]
    }
}
