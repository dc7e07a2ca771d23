//! Piecewise polynomial interpolation on panel-wise Gauss nodes.
//!
//! Each panel carries its own nodes and is interpolated with the barycentric
//! Lagrange formula, so data sampled at Gauss–Legendre points is reproduced
//! to the same order as the quadrature that produced it.

#[derive(Debug, Clone)]
pub struct PanelLagrange {
    edges: Vec<f64>,
    xs: Vec<f64>,
    ys: Vec<f64>,
    bary: Vec<f64>,
    per_panel: usize,
}

impl PanelLagrange {
    /// `edges` has one more entry than there are panels; `xs` holds
    /// `per_panel` increasing nodes inside each panel, panel by panel.
    pub fn new(edges: Vec<f64>, xs: Vec<f64>, ys: Vec<f64>, per_panel: usize) -> Self {
        assert!(edges.len() >= 2 && per_panel >= 1);
        assert_eq!(xs.len(), (edges.len() - 1) * per_panel);
        assert_eq!(xs.len(), ys.len());
        let mut bary = Vec::with_capacity(xs.len());
        for p in xs.chunks(per_panel) {
            for (j, xj) in p.iter().enumerate() {
                let prod: f64 = p
                    .iter()
                    .enumerate()
                    .filter(|(m, _)| *m != j)
                    .map(|(_, xm)| xj - xm)
                    .product();
                bary.push(1.0 / prod);
            }
        }
        Self {
            edges,
            xs,
            ys,
            bary,
            per_panel,
        }
    }

    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    pub fn x_min(&self) -> f64 {
        self.edges[0]
    }

    pub fn x_max(&self) -> f64 {
        self.edges[self.edges.len() - 1]
    }

    /// Value at `x`; outside the edges the end panel's polynomial is used.
    pub fn eval(&self, x: f64) -> f64 {
        let panels = self.edges.len() - 1;
        let i = self.edges.partition_point(|&e| e <= x).saturating_sub(1).min(panels - 1);
        let r = i * self.per_panel..(i + 1) * self.per_panel;
        let (xs, ys, ws) = (&self.xs[r.clone()], &self.ys[r.clone()], &self.bary[r]);
        let mut num = 0.0;
        let mut den = 0.0;
        for ((xj, yj), wj) in xs.iter().zip(ys).zip(ws) {
            let d = x - xj;
            if d == 0.0 {
                return *yj;
            }
            let c = wj / d;
            num += c * yj;
            den += c;
        }
        num / den
    }
}
