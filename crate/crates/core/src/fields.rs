//! Transverse field maps of first-order beams at the waist plane.
//!
//! Hermite-Gauss modes are evaluated without Gouy phase or wavefront
//! curvature and normalized to unit L² norm on the infinite plane:
//! `ψ00 = √(2/π)/w0 · exp(−r²/w0²)`, `ψ10 = ψ00 · 2x/w0`, `ψ01 = ψ00 · 2y/w0`.
//!
//! Pixels sit at cell centers of a symmetric grid spanning
//! `[−extent·w0, extent·w0]` on both axes. Maps are stored row-major with
//! `y` increasing with the row index.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::algebra::{c, Complex2x2, C64};
use crate::error::{Error, Result};
use crate::states::{stokes_of, CoherencyMatrix2, StokesVector, TwoQubitAmplitudes};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub nx: usize,
    pub ny: usize,
    /// Half-width of the window in units of `w0`.
    pub extent: f64,
    #[serde(default = "Grid::default_w0")]
    pub w0: f64,
}

impl Default for Grid {
    fn default() -> Self {
        Self { nx: 512, ny: 512, extent: 3.0, w0: 1.0 }
    }
}

impl Grid {
    fn default_w0() -> f64 {
        1.0
    }

    pub fn new(nx: usize, ny: usize, extent: f64, w0: f64) -> Result<Self> {
        let g = Self { nx, ny, extent, w0 };
        g.validate()?;
        Ok(g)
    }

    pub fn square(n: usize, extent: f64) -> Result<Self> {
        Self::new(n, n, extent, 1.0)
    }

    pub fn validate(&self) -> Result<()> {
        if self.nx < 2 || self.ny < 2 {
            return Err(Error::InvalidGrid(format!("need at least 2x2 pixels, got {}x{}", self.nx, self.ny)));
        }
        if !(self.extent > 0.0) || !self.extent.is_finite() {
            return Err(Error::InvalidGrid(format!("extent must be positive, got {}", self.extent)));
        }
        if !(self.w0 > 0.0) || !self.w0.is_finite() {
            return Err(Error::InvalidGrid(format!("w0 must be positive, got {}", self.w0)));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.extent * self.w0 / self.nx as f64
    }

    pub fn dy(&self) -> f64 {
        2.0 * self.extent * self.w0 / self.ny as f64
    }

    pub fn pixel_area(&self) -> f64 {
        self.dx() * self.dy()
    }

    pub fn x(&self, i: usize) -> f64 {
        -self.extent * self.w0 + (i as f64 + 0.5) * self.dx()
    }

    pub fn y(&self, j: usize) -> f64 {
        -self.extent * self.w0 + (j as f64 + 0.5) * self.dy()
    }

    /// `(x, y)` of every pixel in storage order.
    pub fn coords(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        (0..self.ny).flat_map(move |j| (0..self.nx).map(move |i| (self.x(i), self.y(j))))
    }

    fn sample(&self, f: impl Fn(f64, f64) -> C64) -> ModeMap {
        ModeMap { grid: *self, values: self.coords().map(|(x, y)| f(x, y)).collect() }
    }
}

/// Scalar complex map on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeMap {
    pub grid: Grid,
    pub values: Vec<C64>,
}

impl ModeMap {
    /// `∫ conj(self) · other dA` by the midpoint rule.
    pub fn overlap(&self, other: &ModeMap) -> C64 {
        let s: C64 = self.values.iter().zip(&other.values).map(|(a, b)| a.conj() * b).sum();
        s * self.grid.pixel_area()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.overlap(self).re
    }

    pub fn max_abs_diff(&self, other: &ModeMap) -> f64 {
        self.values.iter().zip(&other.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn combine(a: C64, ma: &ModeMap, b: C64, mb: &ModeMap) -> ModeMap {
        let values = ma.values.iter().zip(&mb.values).map(|(u, v)| a * u + b * v).collect();
        ModeMap { grid: ma.grid, values }
    }

    /// Value at the pixel `(i, j)`.
    pub fn at(&self, i: usize, j: usize) -> C64 {
        self.values[j * self.grid.nx + i]
    }
}

/// Physicists' Hermite polynomial `H_n(t)`.
fn hermite(n: usize, t: f64) -> f64 {
    let (mut h0, mut h1) = (1.0, 2.0 * t);
    if n == 0 {
        return h0;
    }
    for k in 1..n {
        let h2 = 2.0 * t * h1 - 2.0 * k as f64 * h0;
        h0 = h1;
        h1 = h2;
    }
    h1
}

/// 1D factor with `∫ |u_n(x)|² dx = 1`.
fn hg_1d(n: usize, x: f64, w0: f64) -> f64 {
    let t = std::f64::consts::SQRT_2 * x / w0;
    let fact: f64 = (1..=n).map(|k| k as f64).product();
    let norm = (std::f64::consts::SQRT_2 / (PI.sqrt() * 2f64.powi(n as i32) * fact * w0)).sqrt();
    norm * hermite(n, t) * (-(x * x) / (w0 * w0)).exp()
}

/// Hermite-Gauss mode `ψmn` at the waist.
pub fn hg_mode(m: usize, n: usize, grid: &Grid) -> ModeMap {
    let w0 = grid.w0;
    grid.sample(|x, y| c(hg_1d(m, x, w0) * hg_1d(n, y, w0), 0.0))
}

/// Named first-order spatial modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpatialMode {
    Hg10,
    Hg01,
    /// HG10 rotated by +45°, `(ψ10 + ψ01)/√2`.
    Plus,
    /// HG10 rotated by −45°, `(ψ10 − ψ01)/√2`.
    Minus,
    /// Doughnut with `exp(+iφ)`, `(ψ10 + iψ01)/√2`.
    Left,
    /// Doughnut with `exp(−iφ)`, `(ψ10 − iψ01)/√2`.
    Right,
}

/// Evaluates the mode from its own closed form rather than by combining
/// `ψ10` and `ψ01`, so the basis identities are real checks.
pub fn spatial_mode(mode: SpatialMode, grid: &Grid) -> ModeMap {
    let w0 = grid.w0;
    let amp = (2.0 / PI).sqrt() / w0 * 2.0 / w0;
    let g = move |x: f64, y: f64| (-(x * x + y * y) / (w0 * w0)).exp();
    match mode {
        SpatialMode::Hg10 => hg_mode(1, 0, grid),
        SpatialMode::Hg01 => hg_mode(0, 1, grid),
        SpatialMode::Plus | SpatialMode::Minus => {
            let s = if mode == SpatialMode::Plus { 1.0 } else { -1.0 };
            grid.sample(move |x, y| {
                let u = (x + s * y) * FRAC_1_SQRT_2;
                c(amp * u * g(x, y), 0.0)
            })
        }
        SpatialMode::Left | SpatialMode::Right => {
            let s = if mode == SpatialMode::Left { 1.0 } else { -1.0 };
            grid.sample(move |x, y| {
                let r = x.hypot(y);
                let phi = y.atan2(x);
                C64::from_polar(amp * FRAC_1_SQRT_2 * r * g(x, y), s * phi)
            })
        }
    }
}

/// Per-pixel Jones vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldMap {
    pub grid: Grid,
    pub ex: Vec<C64>,
    pub ey: Vec<C64>,
}

impl FieldMap {
    pub fn zeros(grid: &Grid) -> Self {
        let z = vec![C64::new(0.0, 0.0); grid.len()];
        Self { grid: *grid, ex: z.clone(), ey: z }
    }

    /// `pol ⊗ mode` as a field map.
    pub fn product(pol: [C64; 2], mode: &ModeMap) -> Self {
        Self {
            grid: mode.grid,
            ex: mode.values.iter().map(|v| pol[0] * v).collect(),
            ey: mode.values.iter().map(|v| pol[1] * v).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            grid: self.grid,
            ex: self.ex.iter().zip(&other.ex).map(|(a, b)| a + b).collect(),
            ey: self.ey.iter().zip(&other.ey).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            grid: self.grid,
            ex: self.ex.iter().map(|a| s * a).collect(),
            ey: self.ey.iter().map(|a| s * a).collect(),
        }
    }

    pub fn jones(&self, k: usize) -> [C64; 2] {
        [self.ex[k], self.ey[k]]
    }

    pub fn intensity(&self) -> Vec<f64> {
        self.ex.iter().zip(&self.ey).map(|(a, b)| a.norm_sqr() + b.norm_sqr()).collect()
    }

    pub fn phase_x(&self) -> Vec<f64> {
        self.ex.iter().map(|a| a.arg()).collect()
    }

    pub fn phase_y(&self) -> Vec<f64> {
        self.ey.iter().map(|a| a.arg()).collect()
    }

    pub fn local_stokes(&self) -> Vec<StokesVector> {
        (0..self.ex.len()).map(|k| stokes_of(&CoherencyMatrix2::pure(self.jones(k)))).collect()
    }

    pub fn total_power(&self) -> f64 {
        self.intensity().iter().sum::<f64>() * self.grid.pixel_area()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let d = |a: &[C64], b: &[C64]| a.iter().zip(b).map(|(u, v)| (u - v).norm()).fold(0.0, f64::max);
        d(&self.ex, &other.ex).max(d(&self.ey, &other.ey))
    }

    /// Grid-integrated polarization coherency `∫ E E† dA`.
    pub fn polarization_coherency(&self) -> CoherencyMatrix2 {
        let mut m = Complex2x2::zero();
        for k in 0..self.ex.len() {
            let v = self.jones(k);
            for a in 0..2 {
                for b in 0..2 {
                    m.0[a][b] += v[a] * v[b].conj();
                }
            }
        }
        CoherencyMatrix2(m.scale(c(self.grid.pixel_area(), 0.0)))
    }
}

/// `E(r) = (A00 ψ10 + A01 ψ01) e_x + (A10 ψ10 + A11 ψ01) e_y`.
pub fn render(e: &TwoQubitAmplitudes, grid: &Grid) -> FieldMap {
    let p10 = hg_mode(1, 0, grid);
    let p01 = hg_mode(0, 1, grid);
    let a = e.0;
    FieldMap {
        grid: *grid,
        ex: ModeMap::combine(a[0], &p10, a[1], &p01).values,
        ey: ModeMap::combine(a[2], &p10, a[3], &p01).values,
    }
}

/// The three equivalent ways of writing the radial beam.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Decomposition {
    /// `(e_x ψ10 + e_y ψ01)/√2`
    HermiteGauss,
    /// `(e_+ ψ+ + e_− ψ−)/√2`
    Diagonal,
    /// `(e_L ψR + e_R ψL)/√2`
    Circular,
}

impl Decomposition {
    pub const ALL: [Decomposition; 3] = [Decomposition::HermiteGauss, Decomposition::Diagonal, Decomposition::Circular];
}

/// Renders a decomposition term by term from the mode closed forms.
pub fn render_decomposition(d: Decomposition, grid: &Grid) -> FieldMap {
    use crate::states::kets;
    let terms = match d {
        Decomposition::HermiteGauss => [(kets::zero(), SpatialMode::Hg10), (kets::one(), SpatialMode::Hg01)],
        Decomposition::Diagonal => [(kets::plus(), SpatialMode::Plus), (kets::minus(), SpatialMode::Minus)],
        Decomposition::Circular => [(kets::left(), SpatialMode::Right), (kets::right(), SpatialMode::Left)],
    };
    let h = c(FRAC_1_SQRT_2, 0.0);
    let a = FieldMap::product(terms[0].0, &spatial_mode(terms[0].1, grid));
    let b = FieldMap::product(terms[1].0, &spatial_mode(terms[1].1, grid));
    a.add(&b).scale(h)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MapLayer {
    Intensity,
    PhaseX,
    PhaseY,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MapFormat {
    Pixmap(MapLayer),
    Csv,
}

/// Display gamma for intensity pixmaps: `v = (I / I_max)^(1/2.2)`.
pub const PIXMAP_GAMMA: f64 = 2.2;

/// Hue wheel for phase layers: the phase in `[−π, π)` maps linearly onto
/// hue `[0, 360)` degrees, starting at red for −π. Brightness follows the
/// square root of the normalized component intensity so that zeros read dark.
pub fn phase_color(phase: f64, brightness: f64) -> [u8; 3] {
    let h = ((phase + PI) / (2.0 * PI)).rem_euclid(1.0) * 6.0;
    let x = 1.0 - (h % 2.0 - 1.0).abs();
    let (r, g, b) = match h as usize {
        0 => (1.0, x, 0.0),
        1 => (x, 1.0, 0.0),
        2 => (0.0, 1.0, x),
        3 => (0.0, x, 1.0),
        4 => (x, 0.0, 1.0),
        _ => (1.0, 0.0, x),
    };
    let v = brightness.clamp(0.0, 1.0);
    let q = |u: f64| (u * v * 255.0).round() as u8;
    [q(r), q(g), q(b)]
}

fn pixmap_bytes(map: &FieldMap, layer: MapLayer) -> Vec<u8> {
    let g = map.grid;
    let mut out = format!("P6\n{} {}\n255\n", g.nx, g.ny).into_bytes();
    let pixels: Vec<[u8; 3]> = match layer {
        MapLayer::Intensity => {
            let i = map.intensity();
            let max = i.iter().cloned().fold(0.0, f64::max);
            i.iter()
                .map(|v| {
                    let t = if max > 0.0 { (v / max).powf(1.0 / PIXMAP_GAMMA) } else { 0.0 };
                    let b = (t * 255.0).round() as u8;
                    [b, b, b]
                })
                .collect()
        }
        MapLayer::PhaseX | MapLayer::PhaseY => {
            let comp = if layer == MapLayer::PhaseX { &map.ex } else { &map.ey };
            let max = comp.iter().map(|a| a.norm_sqr()).fold(0.0, f64::max);
            comp.iter()
                .map(|a| {
                    let b = if max > 0.0 { (a.norm_sqr() / max).sqrt() } else { 0.0 };
                    phase_color(a.arg(), b)
                })
                .collect()
        }
    };
    // Image rows run top to bottom, so +y ends up at the top.
    for j in (0..g.ny).rev() {
        for i in 0..g.nx {
            out.extend_from_slice(&pixels[j * g.nx + i]);
        }
    }
    out
}

pub fn write_csv<W: Write>(map: &FieldMap, w: W) -> Result<()> {
    let mut w = BufWriter::new(w);
    writeln!(w, "x,y,ReEx,ImEx,ReEy,ImEy")?;
    for (k, (x, y)) in map.grid.coords().enumerate() {
        let (ex, ey) = (map.ex[k], map.ey[k]);
        writeln!(w, "{x:.8e},{y:.8e},{:.8e},{:.8e},{:.8e},{:.8e}", ex.re, ex.im, ey.re, ey.im)?;
    }
    w.flush()?;
    Ok(())
}

/// Write a map as a P6 pixmap layer or as CSV.
pub fn emit_map(map: &FieldMap, path: &Path, format: MapFormat) -> Result<()> {
    let file = std::fs::File::create(path)?;
    match format {
        MapFormat::Csv => write_csv(map, file),
        MapFormat::Pixmap(layer) => {
            let mut w = BufWriter::new(file);
            w.write_all(&pixmap_bytes(map, layer))?;
            w.flush()?;
            Ok(())
        }
    }
}

/// Parse a CSV written by [`write_csv`]. The grid is recovered in units
/// where `w0 = 1`, so `extent` is the physical half-width.
pub fn read_csv<R: Read>(r: R) -> Result<FieldMap> {
    let mut lines = BufReader::new(r).lines();
    let header = lines.next().ok_or_else(|| Error::MalformedMap("empty input".into()))??;
    if header.trim() != "x,y,ReEx,ImEx,ReEy,ImEy" {
        return Err(Error::MalformedMap(format!("unexpected header `{header}`")));
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut ex = Vec::new();
    let mut ey = Vec::new();
    for (n, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let v: Vec<f64> = line
            .split(',')
            .map(|f| f.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::MalformedMap(format!("row {}: {e}", n + 2)))?;
        if v.len() != 6 {
            return Err(Error::MalformedMap(format!("row {}: expected 6 columns, got {}", n + 2, v.len())));
        }
        xs.push(v[0]);
        ys.push(v[1]);
        ex.push(C64::new(v[2], v[3]));
        ey.push(C64::new(v[4], v[5]));
    }
    if xs.is_empty() {
        return Err(Error::MalformedMap("no data rows".into()));
    }
    // Row-major: the first row is the run of pixels sharing the first y.
    let nx = ys.iter().take_while(|&&y| y == ys[0]).count();
    if nx < 2 || xs.len() % nx != 0 {
        return Err(Error::MalformedMap(format!("{} rows do not form a grid with row length {nx}", xs.len())));
    }
    let ny = xs.len() / nx;
    let extent = (xs[nx - 1] - xs[0]) / 2.0 * nx as f64 / (nx - 1) as f64;
    let grid = Grid::new(nx, ny, extent, 1.0)?;
    let tol = 1e-6 * extent;
    for (k, (x, y)) in grid.coords().enumerate() {
        if (xs[k] - x).abs() > tol || (ys[k] - y).abs() > tol {
            return Err(Error::MalformedMap(format!("row {} is off the pixel-center grid", k + 2)));
        }
    }
    Ok(FieldMap { grid, ex, ey })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::radial_beam;

    fn small() -> Grid {
        Grid::square(64, 4.0).unwrap()
    }

    #[test]
    fn grid_validation() {
        assert!(Grid::square(1, 3.0).is_err());
        assert!(Grid::square(8, 0.0).is_err());
        assert!(Grid::new(8, 8, 3.0, -1.0).is_err());
        let g = Grid::square(4, 1.0).unwrap();
        assert_eq!(g.x(0), -g.x(3));
    }

    #[test]
    fn hermite_values() {
        assert_eq!(hermite(0, 0.7), 1.0);
        assert_eq!(hermite(1, 0.7), 1.4);
        assert!((hermite(2, 0.7) - (4.0 * 0.49 - 2.0)).abs() < 1e-15);
    }

    #[test]
    fn hg_closed_form() {
        let g = small();
        let m = hg_mode(1, 0, &g);
        let (x, y) = (g.x(40), g.y(20));
        let want = (2.0 / PI).sqrt() * 2.0 * x * (-(x * x + y * y)).exp();
        assert!((m.at(40, 20).re - want).abs() < 1e-14);
    }

    #[test]
    fn hg_parity() {
        let g = small();
        let p10 = hg_mode(1, 0, &g);
        let p01 = hg_mode(0, 1, &g);
        for j in 0..g.ny {
            for i in 0..g.nx {
                assert_eq!(p10.at(g.nx - 1 - i, j), -p10.at(i, j));
                assert_eq!(p01.at(g.nx - 1 - i, j), p01.at(i, j));
            }
        }
    }

    #[test]
    fn radial_on_x_axis() {
        let g = Grid::square(65, 3.0).unwrap();
        let f = render(&radial_beam(), &g);
        let k = 32 * g.nx + 50;
        assert!(g.y(32).abs() < 1e-15);
        assert!(f.ey[k].norm() < 1e-15 && f.ex[k].norm() > 0.1);
        let i = f.intensity();
        assert!(i[32 * g.nx + 32] < 1e-30);
    }

    #[test]
    fn csv_small_grid() {
        let g = Grid::square(2, 1.0).unwrap();
        let mut buf = Vec::new();
        write_csv(&render(&radial_beam(), &g), &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(text.lines().count(), 5);
        let back = read_csv(buf.as_slice()).unwrap();
        assert_eq!((back.grid.nx, back.grid.ny), (2, 2));
    }

    #[test]
    fn csv_rejects_garbage() {
        assert!(matches!(read_csv("a,b\n".as_bytes()), Err(Error::MalformedMap(_))));
        let bad = "x,y,ReEx,ImEx,ReEy,ImEy\n0,0,1,2,3\n";
        assert!(matches!(read_csv(bad.as_bytes()), Err(Error::MalformedMap(_))));
    }

    #[test]
    fn pixmap_header() {
        let g = Grid::new(5, 3, 2.0, 1.0).unwrap();
        let bytes = pixmap_bytes(&render(&radial_beam(), &g), MapLayer::PhaseX);
        assert!(bytes.starts_with(b"P6\n5 3\n255\n"));
        assert_eq!(bytes.len(), "P6\n5 3\n255\n".len() + 5 * 3 * 3);
    }

    #[test]
    fn hue_wheel() {
        assert_eq!(phase_color(-PI, 1.0), [255, 0, 0]);
        assert_eq!(phase_color(0.0, 1.0), [0, 255, 255]);
        assert_eq!(phase_color(1.0, 0.0), [0, 0, 0]);
    }
}
