//! Sampling grids, field extraction, CSV and SVG export.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::gbdt::{PointEval, TransformedSolution};
use crate::matrix::{determinant, C64};

pub const CSV_HEADER: &str = "x,t,re,im,masked";

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub t_min: f64,
    pub t_max: f64,
    pub nx: usize,
    pub nt: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            x_min: -8.0,
            x_max: 8.0,
            t_min: -8.0,
            t_max: 8.0,
            nx: 201,
            nt: 201,
        }
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    // Weighted form keeps [-r, r] grids exactly symmetric.
    let d = (n - 1) as f64;
    let mut v: Vec<f64> = (0..n).map(|i| (lo * (d - i as f64) + hi * i as f64) / d).collect();
    v[0] = lo;
    v[n - 1] = hi;
    v
}

impl GridSpec {
    pub fn new(x_min: f64, x_max: f64, t_min: f64, t_max: f64, nx: usize, nt: usize) -> Result<Self> {
        let g = Self {
            x_min,
            x_max,
            t_min,
            t_max,
            nx,
            nt,
        };
        g.validate()?;
        Ok(g)
    }

    /// Square grid `[-r, r]²` with `n` points per side.
    pub fn square(r: f64, n: usize) -> Result<Self> {
        Self::new(-r, r, -r, r, n, n)
    }

    pub fn validate(&self) -> Result<()> {
        if self.nx < 2 || self.nt < 2 {
            return Err(Error::config(None, "grid", format!("need nx, nt >= 2, got {}x{}", self.nx, self.nt)));
        }
        if !(self.x_min < self.x_max) {
            return Err(Error::config(None, "x_range", "x_min must be below x_max"));
        }
        if !(self.t_min < self.t_max) {
            return Err(Error::config(None, "t_range", "t_min must be below t_max"));
        }
        Ok(())
    }

    pub fn xs(&self) -> Vec<f64> {
        linspace(self.x_min, self.x_max, self.nx)
    }

    pub fn ts(&self) -> Vec<f64> {
        linspace(self.t_min, self.t_max, self.nt)
    }

    pub fn len(&self) -> usize {
        self.nx * self.nt
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// True when the x samples are symmetric about 0 to rounding.
    pub fn x_symmetric(&self) -> bool {
        (self.x_min + self.x_max).abs() <= 1e-12 * self.x_max.abs().max(1.0)
    }
}

/// Quantity sampled from a [`PointEval`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Field {
    AbsV,
    LnAbsV,
    AbsRho,
    LnAbsRho,
    V,
    V2,
    Rho,
    Rho1,
    DetS,
}

impl Field {
    pub const ALL: [Field; 9] = [
        Field::AbsV,
        Field::LnAbsV,
        Field::AbsRho,
        Field::LnAbsRho,
        Field::V,
        Field::V2,
        Field::Rho,
        Field::Rho1,
        Field::DetS,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Field::AbsV => "abs_v",
            Field::LnAbsV => "ln_abs_v",
            Field::AbsRho => "abs_rho",
            Field::LnAbsRho => "ln_abs_rho",
            Field::V => "v",
            Field::V2 => "v2",
            Field::Rho => "rho",
            Field::Rho1 => "rho1",
            Field::DetS => "det_s",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Field::ALL.into_iter().find(|f| f.name() == s)
    }

    /// Real-valued fields store their value in the real part.
    pub fn is_real(self) -> bool {
        matches!(self, Field::AbsV | Field::LnAbsV | Field::AbsRho | Field::LnAbsRho)
    }

    pub fn extract(self, p: &PointEval) -> C64 {
        let r = |v: f64| C64::new(v, 0.0);
        match self {
            Field::AbsV => r(p.v().norm()),
            Field::LnAbsV => r(p.v().norm().ln()),
            Field::AbsRho => r(p.rho().norm()),
            Field::LnAbsRho => r(p.rho().norm().ln()),
            Field::V => p.v(),
            Field::V2 => p.v2(),
            Field::Rho => p.rho(),
            Field::Rho1 => p.rho1(),
            Field::DetS => determinant(&p.s),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    Engine,
    Oracle,
}

/// Row-major samples (`t` outer, `x` inner) with a singular-cell mask.
/// Masked samples hold zero and never reach an export as numbers.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldGrid {
    pub name: String,
    pub xs: Vec<f64>,
    pub ts: Vec<f64>,
    pub samples: Vec<C64>,
    pub mask: Vec<bool>,
    pub provenance: Provenance,
}

impl FieldGrid {
    pub fn new(name: impl Into<String>, xs: Vec<f64>, ts: Vec<f64>, provenance: Provenance) -> Self {
        let n = xs.len() * ts.len();
        Self {
            name: name.into(),
            xs,
            ts,
            samples: vec![C64::new(0.0, 0.0); n],
            mask: vec![true; n],
            provenance,
        }
    }

    /// Samples `f` on the grid; errors and non-finite values are masked.
    pub fn from_fn(
        name: impl Into<String>,
        spec: &GridSpec,
        provenance: Provenance,
        f: impl Fn(f64, f64) -> Option<C64>,
    ) -> Self {
        let mut g = Self::new(name, spec.xs(), spec.ts(), provenance);
        for it in 0..g.ts.len() {
            for ix in 0..g.xs.len() {
                let v = f(g.xs[ix], g.ts[it]);
                g.set(ix, it, v);
            }
        }
        g
    }

    pub fn nx(&self) -> usize {
        self.xs.len()
    }

    pub fn nt(&self) -> usize {
        self.ts.len()
    }

    pub fn index(&self, ix: usize, it: usize) -> usize {
        it * self.nx() + ix
    }

    pub fn get(&self, ix: usize, it: usize) -> Option<C64> {
        let k = self.index(ix, it);
        (!self.mask[k]).then(|| self.samples[k])
    }

    pub fn set(&mut self, ix: usize, it: usize, value: Option<C64>) {
        let k = self.index(ix, it);
        match value.filter(|v| v.is_finite()) {
            Some(v) => {
                self.samples[k] = v;
                self.mask[k] = false;
            }
            None => {
                self.samples[k] = C64::new(0.0, 0.0);
                self.mask[k] = true;
            }
        }
    }

    pub fn masked_count(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }

    /// Unmasked values, in storage order.
    pub fn values(&self) -> impl Iterator<Item = C64> + '_ {
        self.samples.iter().zip(&self.mask).filter(|(_, &m)| !m).map(|(v, _)| *v)
    }

    /// `(min, max)` of |value| over unmasked cells.
    pub fn magnitude_range(&self) -> Option<(f64, f64)> {
        self.values().map(|v| v.norm()).fold(None, |acc, m| match acc {
            None => Some((m, m)),
            Some((lo, hi)) => Some((lo.min(m), hi.max(m))),
        })
    }

    /// Max |a − b| over cells unmasked in both, or `None` when the masks
    /// differ in shape.
    pub fn max_deviation(&self, other: &FieldGrid) -> Option<f64> {
        if self.samples.len() != other.samples.len() {
            return None;
        }
        Some(
            (0..self.samples.len())
                .filter(|&k| !self.mask[k] && !other.mask[k])
                .map(|k| (self.samples[k] - other.samples[k]).norm())
                .fold(0.0, f64::max),
        )
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.samples.len() * 100);
        out.push_str(CSV_HEADER);
        out.push('\n');
        for it in 0..self.nt() {
            for ix in 0..self.nx() {
                let (x, t) = (self.xs[ix], self.ts[it]);
                match self.get(ix, it) {
                    Some(v) => writeln!(out, "{x:.16e},{t:.16e},{:.16e},{:.16e},0", v.re, v.im),
                    None => writeln!(out, "{x:.16e},{t:.16e},,,1"),
                }
                .expect("writing to a String");
            }
        }
        out
    }

    /// Parses the output of [`FieldGrid::to_csv`].
    pub fn from_csv(name: impl Into<String>, text: &str, provenance: Provenance) -> Result<Self> {
        let mut lines = text.split('\n');
        let bad = |line: usize, msg: String| Error::config(Some(line), "csv", msg);
        match lines.next() {
            Some(h) if h == CSV_HEADER => {}
            other => return Err(bad(1, format!("expected header `{CSV_HEADER}`, got {other:?}"))),
        }
        let mut rows = Vec::new();
        for (k, line) in lines.enumerate() {
            let lineno = k + 2;
            if line.is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split(',').collect();
            if cols.len() != 5 {
                return Err(bad(lineno, format!("expected 5 columns, got {}", cols.len())));
            }
            let num = |s: &str| s.parse::<f64>().map_err(|e| bad(lineno, format!("{s:?}: {e}")));
            let x = num(cols[0])?;
            let t = num(cols[1])?;
            let value = match cols[4] {
                "0" => Some(C64::new(num(cols[2])?, num(cols[3])?)),
                "1" if cols[2].is_empty() && cols[3].is_empty() => None,
                _ => return Err(bad(lineno, format!("bad masked row `{line}`"))),
            };
            rows.push((x, t, value));
        }
        let nx = rows.iter().take_while(|r| r.1.to_bits() == rows[0].1.to_bits()).count();
        if nx == 0 || rows.len() % nx != 0 {
            return Err(bad(2, "rows do not form a rectangular grid".into()));
        }
        let xs: Vec<f64> = rows[..nx].iter().map(|r| r.0).collect();
        let ts: Vec<f64> = rows.iter().step_by(nx).map(|r| r.1).collect();
        let mut g = Self::new(name, xs, ts, provenance);
        for (k, (x, t, v)) in rows.into_iter().enumerate() {
            let (ix, it) = (k % nx, k / nx);
            if x.to_bits() != g.xs[ix].to_bits() || t.to_bits() != g.ts[it].to_bits() {
                return Err(bad(k + 2, "coordinates are not a tensor grid".into()));
            }
            g.set(ix, it, v);
        }
        Ok(g)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_csv())?;
        Ok(())
    }

    pub fn write_svg(&self, path: &Path, options: &SvgOptions) -> Result<()> {
        fs::write(path, self.to_svg(options))?;
        Ok(())
    }

    pub fn to_svg(&self, options: &SvgOptions) -> String {
        svg::render(self, options)
    }
}

/// Evaluates the selected fields of `sol` over `spec`.
pub fn sample_fields(sol: &TransformedSolution, spec: &GridSpec, fields: &[Field]) -> Result<Vec<FieldGrid>> {
    let xs = spec.xs();
    let ts = spec.ts();
    let points = sol.evaluate_grid(&xs, &ts)?;
    Ok(fields
        .iter()
        .map(|&f| {
            let mut g = FieldGrid::new(f.name(), xs.clone(), ts.clone(), Provenance::Engine);
            for (it, row) in points.iter().enumerate() {
                for (ix, p) in row.iter().enumerate() {
                    g.set(ix, it, p.as_ref().ok().map(|p| f.extract(p)));
                }
            }
            g
        })
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ColorScale {
    Linear,
    Log,
}

#[derive(Clone, Copy, Debug)]
pub struct SvgOptions {
    pub scale: ColorScale,
    /// Percentile clamp of the colour range, e.g. `(0.01, 0.99)`.
    pub clamp: (f64, f64),
    pub cell: f64,
}

impl Default for SvgOptions {
    fn default() -> Self {
        Self {
            scale: ColorScale::Linear,
            clamp: (0.01, 0.99),
            cell: 3.0,
        }
    }
}

mod svg {
    use super::*;

    const STOPS: [(f64, [u8; 3]); 5] = [
        (0.0, [68, 1, 84]),
        (0.25, [59, 82, 139]),
        (0.5, [33, 145, 140]),
        (0.75, [94, 201, 98]),
        (1.0, [253, 231, 37]),
    ];

    fn color(u: f64) -> String {
        let u = u.clamp(0.0, 1.0);
        let k = STOPS.iter().position(|s| s.0 >= u).unwrap_or(STOPS.len() - 1).max(1);
        let (u0, c0) = STOPS[k - 1];
        let (u1, c1) = STOPS[k];
        let w = (u - u0) / (u1 - u0);
        let mix = |i: usize| (c0[i] as f64 + w * (c1[i] as f64 - c0[i] as f64)).round() as u8;
        format!("#{:02x}{:02x}{:02x}", mix(0), mix(1), mix(2))
    }

    fn scalar(v: C64, real: bool, scale: ColorScale) -> Option<f64> {
        let s = if real { v.re } else { v.norm() };
        match scale {
            ColorScale::Linear => Some(s),
            ColorScale::Log => (s > 0.0).then(|| s.log10()),
        }
    }

    fn quantile(sorted: &[f64], q: f64) -> f64 {
        let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
        sorted[pos.round() as usize]
    }

    fn tick(v: f64) -> String {
        format!("{v:.3}").trim_end_matches('0').trim_end_matches('.').to_string()
    }

    pub(super) fn render(g: &FieldGrid, o: &SvgOptions) -> String {
        let real = g.values().all(|v| v.im == 0.0);
        let vals: Vec<Option<f64>> = g
            .samples
            .iter()
            .zip(&g.mask)
            .map(|(v, &m)| if m { None } else { scalar(*v, real, o.scale) })
            .collect();
        let mut sorted: Vec<f64> = vals.iter().flatten().copied().collect();
        sorted.sort_by(f64::total_cmp);
        let (lo, hi) = if sorted.is_empty() {
            (0.0, 1.0)
        } else {
            (quantile(&sorted, o.clamp.0), quantile(&sorted, o.clamp.1))
        };
        let span = if hi > lo { hi - lo } else { 1.0 };

        let (nx, nt) = (g.nx(), g.nt());
        let c = o.cell;
        let (left, top) = (60.0, 30.0);
        let (w, h) = (nx as f64 * c, nt as f64 * c);
        let legend_x = left + w + 30.0;
        let total_w = legend_x + 90.0;
        let total_h = top + h + 60.0;

        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{total_w}" height="{total_h}" viewBox="0 0 {total_w} {total_h}" font-family="sans-serif" font-size="11">"#
        );
        s.push_str(
            r##"<defs><pattern id="hatch" width="4" height="4" patternUnits="userSpaceOnUse"><rect width="4" height="4" fill="#ffffff"/><path d="M0,4 L4,0" stroke="#888888" stroke-width="0.8"/></pattern>"##,
        );
        s.push_str(r#"<linearGradient id="legend" x1="0" y1="1" x2="0" y2="0">"#);
        for (u, _) in STOPS {
            let _ = write!(s, r#"<stop offset="{u}" stop-color="{}"/>"#, color(u));
        }
        s.push_str("</linearGradient></defs>\n");
        let _ = writeln!(s, r#"<text x="{left}" y="18" font-size="13">{}</text>"#, g.name);
        let _ = writeln!(s, r#"<g shape-rendering="crispEdges">"#);
        for it in 0..nt {
            // t increases upwards
            let y = top + (nt - 1 - it) as f64 * c;
            for ix in 0..nx {
                let x = left + ix as f64 * c;
                let fill = match vals[g.index(ix, it)] {
                    Some(v) => color((v - lo) / span),
                    None => "url(#hatch)".to_string(),
                };
                let _ = writeln!(s, r#"<rect x="{x}" y="{y}" width="{c}" height="{c}" fill="{fill}"/>"#);
            }
        }
        s.push_str("</g>\n");
        let _ = writeln!(
            s,
            r#"<rect x="{left}" y="{top}" width="{w}" height="{h}" fill="none" stroke="black"/>"#
        );
        let (x0, x1) = (g.xs[0], g.xs[nx - 1]);
        let (t0, t1) = (g.ts[0], g.ts[nt - 1]);
        for k in 0..=4 {
            let u = k as f64 / 4.0;
            let px = left + u * w;
            let py = top + h - u * h;
            let _ = writeln!(
                s,
                r#"<line x1="{px}" y1="{}" x2="{px}" y2="{}" stroke="black"/><text x="{px}" y="{}" text-anchor="middle">{}</text>"#,
                top + h,
                top + h + 5.0,
                top + h + 18.0,
                tick(x0 + u * (x1 - x0))
            );
            let _ = writeln!(
                s,
                r#"<line x1="{}" y1="{py}" x2="{left}" y2="{py}" stroke="black"/><text x="{}" y="{}" text-anchor="end">{}</text>"#,
                left - 5.0,
                left - 8.0,
                py + 4.0,
                tick(t0 + u * (t1 - t0))
            );
        }
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="middle">x</text><text x="15" y="{}" text-anchor="middle">t</text>"#,
            left + w / 2.0,
            top + h + 40.0,
            top + h / 2.0
        );
        let _ = writeln!(
            s,
            r#"<rect x="{legend_x}" y="{top}" width="16" height="{h}" fill="url(#legend)" stroke="black"/>"#
        );
        let label = match o.scale {
            ColorScale::Linear => "",
            ColorScale::Log => "log10 ",
        };
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}">{label}{}</text><text x="{}" y="{}">{label}{}</text>"#,
            legend_x + 20.0,
            top + 10.0,
            tick(hi),
            legend_x + 20.0,
            top + h,
            tick(lo)
        );
        s.push_str("</svg>\n");
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> FieldGrid {
        let spec = GridSpec::new(0.0, 1.0, 0.0, 1.0, 2, 2).unwrap();
        FieldGrid::from_fn("f", &spec, Provenance::Engine, |x, t| {
            (x + t < 2.0).then(|| C64::new(x - t, 0.1 * x))
        })
    }

    #[test]
    fn csv_rows_and_mask() {
        let csv = tiny().to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 5);
        assert_eq!(lines[0], CSV_HEADER);
        assert!(lines[4].ends_with(",,,1"));
        assert!(!csv.contains('\r'));
    }

    #[test]
    fn csv_round_trip() {
        let g = tiny();
        let csv = g.to_csv();
        let back = FieldGrid::from_csv("f", &csv, Provenance::Engine).unwrap();
        assert_eq!(back, g);
        assert_eq!(back.to_csv(), csv);
    }

    #[test]
    fn non_finite_is_masked() {
        let spec = GridSpec::new(0.0, 1.0, 0.0, 1.0, 2, 2).unwrap();
        let g = FieldGrid::from_fn("f", &spec, Provenance::Oracle, |x, _| Some(C64::new(1.0 / x, 0.0)));
        assert_eq!(g.masked_count(), 2);
        assert!(g.values().all(|v| v.is_finite()));
    }

    #[test]
    fn grid_validation() {
        assert!(GridSpec::new(1.0, 0.0, 0.0, 1.0, 5, 5).is_err());
        assert!(GridSpec::new(0.0, 1.0, 0.0, 1.0, 1, 5).is_err());
        let g = GridSpec::default();
        assert_eq!(g.xs()[100], 0.0);
        assert_eq!(g.xs()[200], 8.0);
        assert!(g.x_symmetric());
    }

    #[test]
    fn svg_has_hatching_and_legend() {
        let svg = tiny().to_svg(&SvgOptions::default());
        assert!(svg.contains("url(#hatch)"));
        assert!(svg.contains("linearGradient"));
        assert_eq!(svg.matches("<rect x=").count(), 4 + 2);
    }
}
