//! Element-level simulation of the single-shot polarimeter.
//!
//! Layout of the bench:
//!
//! ```text
//! radial probe -> sample T -> BS 1:2 --(1/3)--> MC A -> MBS A -> port 1 (ψL)  -> CPM, β = 3
//!                               |                              port 2 (ψR)  -> aux detector
//!                               +--(2/3)--> BS 1:1 -> MC B -> MBS B -> port 1 (ψ+) -> CPM, β = 2
//!                                                 |                   port 2 (ψ−) -> aux detector
//!                                                 +-> MC C -> MBS C -> port 1 (ψ10) -> CPM, β = 0
//!                                                                     port 2 (ψ01) -> CPM, β = 1
//! ```
//!
//! Each CPM splits its input three ways (QWP at π/4, HWP at π/8, nothing),
//! each followed by a polarizing beam splitter. The x-ports read `e_L`,
//! `e_+` and `e_x`, the y-port of the bare branch reads `e_y`; the two
//! remaining y-ports (`e_R`, `e_−`) are auxiliary. That gives 16 primary and
//! 10 auxiliary detectors.
//!
//! Power splitters only multiply `power_scale`; their phases never meet
//! again downstream. Everything that interferes (the mode beam splitter) is
//! simulated at the amplitude level.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, FRAC_PI_8};

use rand::Rng;
use rand_distr::{Distribution, Normal, Poisson};
use serde::{Deserialize, Serialize};

use crate::algebra::{c, kron, pauli, Complex2x2, Complex4x4, C64};
use crate::elements::{
    apply_to_pol, apply_to_spa, converter, rotated, DepolarizingEnsemble, Retardance,
};
use crate::error::{Error, Result};
use crate::polarimetry::{intensities_to_two_dof_stokes, two_dof_reconstruct, IntensityMatrix, MuellerMatrix};
use crate::sampling::rng_from_seed;
use crate::states::{radial_beam, TwoQubitAmplitudes};

/// Field travelling along one path of the bench.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PortField {
    pub amplitudes: TwoQubitAmplitudes,
    /// Product of the power fractions of all ideal splitters passed so far.
    pub power_scale: f64,
    pub label: String,
}

impl PortField {
    pub fn new(amplitudes: TwoQubitAmplitudes, label: impl Into<String>) -> Self {
        Self { amplitudes, power_scale: 1.0, label: label.into() }
    }

    pub fn vacuum(label: impl Into<String>) -> Self {
        Self::new(TwoQubitAmplitudes::zero(), label)
    }

    pub fn power(&self) -> f64 {
        self.power_scale * self.amplitudes.norm_sqr()
    }

    fn with(&self, amplitudes: TwoQubitAmplitudes, step: &str) -> Self {
        Self {
            amplitudes,
            power_scale: self.power_scale,
            label: format!("{}/{}", self.label, step),
        }
    }

    /// Ideal lossless power splitter tap carrying `fraction` of the power.
    fn tap(&self, fraction: f64, step: &str) -> Self {
        Self {
            amplitudes: self.amplitudes,
            power_scale: self.power_scale * fraction,
            label: format!("{}/{}", self.label, step),
        }
    }
}

/// Mirror operator `i (σ3 ⊗ σ3)`: `e_x → −e_x` and `x → −x`, which flips `ψ10`.
pub fn mirror_operator() -> Complex4x4 {
    let z = pauli(3).expect("σ3");
    kron(&z, &z).scale(c(0.0, 1.0))
}

pub fn mirror(f: &PortField) -> PortField {
    f.with(f.amplitudes.apply(&mirror_operator()), "mirror")
}

/// Half-wave plate with its fast axis horizontal: `[Ex, Ey] → i[−Ex, Ey]`.
pub fn inline_hwp(f: &PortField) -> PortField {
    let t = Complex2x2::diag([c(0.0, -1.0), c(0.0, 1.0)]);
    f.with(apply_to_pol(&t, &f.amplitudes), "hwp")
}

/// Bring two fields onto a common `power_scale` so their amplitudes can be added.
fn common_scale(f1: &PortField, f2: &PortField) -> (f64, TwoQubitAmplitudes, TwoQubitAmplitudes) {
    let zero1 = f1.amplitudes.norm_sqr() == 0.0;
    let zero2 = f2.amplitudes.norm_sqr() == 0.0;
    match (zero1, zero2) {
        (true, _) => (f2.power_scale, f1.amplitudes, f2.amplitudes),
        (_, true) => (f1.power_scale, f1.amplitudes, f2.amplitudes),
        _ => {
            let s = f1.power_scale.max(f2.power_scale);
            let a1 = f1.amplitudes.scale(c((f1.power_scale / s).sqrt(), 0.0));
            let a2 = f2.amplitudes.scale(c((f2.power_scale / s).sqrt(), 0.0));
            (s, a1, a2)
        }
    }
}

/// Symmetric 50/50 beam splitter. The reflected contribution picks up the
/// mirror transform: `out1 = (E1 + M E2)/√2`, `out2 = (E2 + M E1)/√2`.
pub fn beamsplitter50(f1: &PortField, f2: &PortField) -> (PortField, PortField) {
    let (scale, a1, a2) = common_scale(f1, f2);
    let m = mirror_operator();
    let h = c(FRAC_1_SQRT_2, 0.0);
    let o1 = a1.add(&a2.apply(&m)).scale(h);
    let o2 = a2.add(&a1.apply(&m)).scale(h);
    let out = |a: TwoQubitAmplitudes, port: &str| PortField {
        amplitudes: a,
        power_scale: scale,
        label: format!("{}/bs{}", f1.label, port),
    };
    (out(o1, "1"), out(o2, "2"))
}

/// Mode beam splitter built from its elements: a Mach-Zehnder interferometer
/// with mirror + HWP in arm 1, two mirrors in arm 2, and a HWP on output 2.
pub fn mode_beam_splitter(f: &PortField) -> (PortField, PortField) {
    let (arm1, arm2) = beamsplitter50(f, &PortField::vacuum(format!("{}/vac", f.label)));
    let arm1 = inline_hwp(&mirror(&arm1));
    let arm2 = mirror(&mirror(&arm2));
    let (mut p1, p2) = beamsplitter50(&arm1, &arm2);
    let mut p2 = inline_hwp(&p2);
    p1.label = format!("{}/mbs1", f.label);
    p2.label = format!("{}/mbs2", f.label);
    (p1, p2)
}

/// Net input-output relation of the mode beam splitter:
/// `out1 = −(A00 e_x + A10 e_y) ψ10`, `out2 = (A01 e_x + A11 e_y) ψ01`.
pub fn mode_beam_splitter_net(f: &PortField) -> (PortField, PortField) {
    let a = f.amplitudes.0;
    let z = c(0.0, 0.0);
    let p1 = TwoQubitAmplitudes([-a[0], z, -a[2], z]);
    let p2 = TwoQubitAmplitudes([z, a[1], z, a[3]]);
    (f.with(p1, "mbs1"), f.with(p2, "mbs2"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ModeConverter {
    /// π/2-converter at π/4: `ψL → ψ10`, `ψR → −i ψ01`.
    A,
    /// π-converter at π/8: `ψ± → −i ψ10 / −i ψ01`.
    B,
    /// Empty space.
    C,
}

impl ModeConverter {
    pub fn unitary(&self) -> Complex2x2 {
        match self {
            ModeConverter::A => rotated(&converter(Retardance::HalfPi), FRAC_PI_4),
            ModeConverter::B => rotated(&converter(Retardance::Pi), FRAC_PI_8),
            ModeConverter::C => Complex2x2::identity(),
        }
    }

    fn name(&self) -> &'static str {
        match self {
            ModeConverter::A => "mcA",
            ModeConverter::B => "mcB",
            ModeConverter::C => "mcC",
        }
    }
}

pub fn mode_converter(which: ModeConverter, f: &PortField) -> PortField {
    f.with(apply_to_spa(&which.unitary(), &f.amplitudes), which.name())
}

/// A detector reading: physical power and the splitter factor it went through.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Reading {
    pub power: f64,
    pub power_scale: f64,
}

impl Reading {
    fn dark(power_scale: f64) -> Self {
        Self { power: 0.0, power_scale }
    }
}

/// Powers delivered by one CPM.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CpmReadings {
    /// Indexed by analyzer state `{e_x, e_y, e_+, e_L}`.
    pub primary: [Reading; 4],
    /// `e_−` (HWP branch y-port) and `e_R` (QWP branch y-port).
    pub minus: Reading,
    pub right: Reading,
}

/// Polarization converter in front of each CPM polarizing beam splitter.
fn pbs_ports(f: &PortField, pc: &Complex2x2) -> (Reading, Reading) {
    let a = apply_to_pol(pc, &f.amplitudes).0;
    let x = a[0].norm_sqr() + a[1].norm_sqr();
    let y = a[2].norm_sqr() + a[3].norm_sqr();
    (
        Reading { power: f.power_scale * x, power_scale: f.power_scale },
        Reading { power: f.power_scale * y, power_scale: f.power_scale },
    )
}

/// Conventional polarization measurement: three equal branches, each a
/// polarization converter and a polarizing beam splitter.
pub fn cpm(f: &PortField) -> CpmReadings {
    let third = 1.0 / 3.0;
    let qwp = rotated(&converter(Retardance::HalfPi), FRAC_PI_4);
    let hwp = rotated(&converter(Retardance::Pi), FRAC_PI_8);
    let (l, r) = pbs_ports(&f.tap(third, "pcA"), &qwp);
    let (plus, minus) = pbs_ports(&f.tap(third, "pcB"), &hwp);
    let (x, y) = pbs_ports(&f.tap(third, "pcC"), &Complex2x2::identity());
    CpmReadings { primary: [x, y, plus, l], minus, right: r }
}

/// Full detector network output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectorMap {
    /// `primary[α][β]`, α analyzer polarization, β postselected spatial mode.
    pub primary: [[Reading; 4]; 4],
    pub auxiliary: BTreeMap<String, Reading>,
}

impl DetectorMap {
    pub const AUX_COUNT: usize = 10;

    pub fn get(&self, alpha: usize, beta: usize) -> Reading {
        self.primary[alpha][beta]
    }

    pub fn label(alpha: usize, beta: usize) -> String {
        format!("{alpha}{beta}")
    }

    /// All readings in a fixed order: primary row-major, then auxiliary by name.
    pub fn readings(&self) -> impl Iterator<Item = (String, Reading)> + '_ {
        let primary = (0..4).flat_map(move |a| (0..4).map(move |b| (Self::label(a, b), self.primary[a][b])));
        primary.chain(self.auxiliary.iter().map(|(k, v)| (k.clone(), *v)))
    }

    fn readings_mut(&mut self) -> impl Iterator<Item = &mut Reading> {
        self.primary.iter_mut().flatten().chain(self.auxiliary.values_mut())
    }

    pub fn total_power(&self) -> f64 {
        self.readings().map(|(_, r)| r.power).sum()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.readings().all(|(_, r)| r.power >= 0.0)
    }

    fn scaled_sum(parts: &[(f64, DetectorMap)]) -> DetectorMap {
        let mut out = parts[0].1.clone();
        for r in out.readings_mut() {
            r.power = 0.0;
        }
        for (w, d) in parts {
            for a in 0..4 {
                for b in 0..4 {
                    out.primary[a][b].power += w * d.primary[a][b].power;
                }
            }
            for (k, v) in &d.auxiliary {
                if let Some(r) = out.auxiliary.get_mut(k) {
                    r.power += w * v.power;
                }
            }
        }
        out
    }
}

/// Intermediate fields of one bench evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchTrace {
    /// Selected MBS outputs feeding the CPMs, indexed by β: ψ10, ψ01, ψ+, ψL.
    pub selected: [PortField; 4],
    /// Unselected outputs of MBS A (ψR) and MBS B (ψ−).
    pub unselected_a: PortField,
    pub unselected_b: PortField,
    pub detectors: DetectorMap,
}

/// Run the bench for a non-depolarizing sample and keep the intermediate fields.
pub fn trace_bench(t: &Complex2x2) -> BenchTrace {
    let probe = PortField::new(radial_beam(), "probe");
    let after = probe.with(apply_to_pol(t, &probe.amplitudes), "sample");

    // 1:2 then 1:1 polarization-maintaining splitters.
    let branch_a = after.tap(1.0 / 3.0, "bs12r");
    let rest = after.tap(2.0 / 3.0, "bs12t");
    let branch_b = rest.tap(0.5, "bs11r");
    let branch_c = rest.tap(0.5, "bs11t");

    let (a1, a2) = mode_beam_splitter(&mode_converter(ModeConverter::A, &branch_a));
    let (b1, b2) = mode_beam_splitter(&mode_converter(ModeConverter::B, &branch_b));
    let (c1, c2) = mode_beam_splitter(&mode_converter(ModeConverter::C, &branch_c));

    let selected = [c1, c2, b1, a1];
    let mut primary = [[Reading::dark(0.0); 4]; 4];
    let mut auxiliary = BTreeMap::new();
    let names = ["psi10", "psi01", "psi_plus", "psi_l"];
    for (beta, port) in selected.iter().enumerate() {
        let r = cpm(port);
        for alpha in 0..4 {
            primary[alpha][beta] = r.primary[alpha];
        }
        auxiliary.insert(format!("{}_e_minus", names[beta]), r.minus);
        auxiliary.insert(format!("{}_e_r", names[beta]), r.right);
    }
    let bucket = |f: &PortField| Reading { power: f.power(), power_scale: f.power_scale };
    auxiliary.insert("mbs_a_psi_r".to_string(), bucket(&a2));
    auxiliary.insert("mbs_b_psi_minus".to_string(), bucket(&b2));

    BenchTrace {
        selected,
        unselected_a: a2,
        unselected_b: b2,
        detectors: DetectorMap { primary, auxiliary },
    }
}

/// Sample under test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Sample {
    Jones(Complex2x2),
    Ensemble(DepolarizingEnsemble),
}

impl Sample {
    pub fn ensemble(&self) -> DepolarizingEnsemble {
        match self {
            Sample::Jones(t) => DepolarizingEnsemble::single(*t),
            Sample::Ensemble(e) => e.clone(),
        }
    }
}

/// Detector readings for a sample; ensembles are power-averaged.
pub fn full_bench(sample: &Sample) -> DetectorMap {
    match sample {
        Sample::Jones(t) => trace_bench(t).detectors,
        Sample::Ensemble(ens) => {
            let parts: Vec<(f64, DetectorMap)> =
                ens.members().iter().map(|(w, t)| (*w, trace_bench(t).detectors)).collect();
            DetectorMap::scaled_sum(&parts)
        }
    }
}

/// Undo the known splitter factors: `I_αβ = power / power_scale`.
pub fn calibrate(d: &DetectorMap) -> Result<IntensityMatrix> {
    let mut i = crate::algebra::Real4x4::zero();
    for a in 0..4 {
        for b in 0..4 {
            let r = d.primary[a][b];
            if r.power_scale == 0.0 {
                return Err(Error::InconsistentScale { label: DetectorMap::label(a, b) });
            }
            i[(a, b)] = r.power / r.power_scale;
        }
    }
    Ok(IntensityMatrix(i))
}

/// Mueller matrix estimated from one detector map.
pub fn reconstruct(d: &DetectorMap) -> Result<MuellerMatrix> {
    let i = calibrate(d)?;
    Ok(two_dof_reconstruct(&intensities_to_two_dof_stokes(&i)))
}

pub fn bench_mueller(sample: &Sample) -> Result<MuellerMatrix> {
    reconstruct(&full_bench(sample))
}

/// Detector noise model.
///
/// Applied per reading, in this order: Poisson shot noise (when `photons` is
/// set), relative Gaussian gain noise, additive dark level, clamp at zero.
/// `photons` and `dark` are expressed in calibrated units, so a detector
/// whose calibrated intensity is 1 collects `photons` photons on average.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct NoiseSpec {
    #[serde(default)]
    pub sigma_rel: f64,
    #[serde(default)]
    pub dark: f64,
    #[serde(default)]
    pub photons: Option<f64>,
}

impl NoiseSpec {
    pub fn relative(sigma_rel: f64) -> Self {
        Self { sigma_rel, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma_rel >= 0.0) || !self.sigma_rel.is_finite() {
            return Err(Error::InvalidNoise(format!("sigma_rel must be >= 0, got {}", self.sigma_rel)));
        }
        if !(self.dark >= 0.0) || !self.dark.is_finite() {
            return Err(Error::InvalidNoise(format!("dark must be >= 0, got {}", self.dark)));
        }
        if let Some(n) = self.photons {
            if !(n > 0.0) || !n.is_finite() {
                return Err(Error::InvalidNoise(format!("photons must be > 0, got {n}")));
            }
        }
        Ok(())
    }

    pub fn is_noiseless(&self) -> bool {
        self.sigma_rel == 0.0 && self.dark == 0.0 && self.photons.is_none()
    }

    /// Perturb one calibrated intensity value.
    pub fn perturb<R: Rng + ?Sized>(&self, value: f64, rng: &mut R) -> f64 {
        let mut v = value;
        if let Some(n) = self.photons {
            let mean = n * v.max(0.0);
            v = if mean > 0.0 {
                let counts: f64 = Poisson::new(mean).expect("positive mean").sample(rng);
                counts / n
            } else {
                0.0
            };
        }
        if self.sigma_rel > 0.0 {
            let g: f64 = Normal::new(0.0, 1.0).expect("unit normal").sample(rng);
            v *= 1.0 + self.sigma_rel * g;
        }
        (v + self.dark).max(0.0)
    }
}

/// Noisy copy of `d`, drawing from `rng` in the fixed order of [`DetectorMap::readings`].
pub fn noisy_readout_with<R: Rng + ?Sized>(d: &DetectorMap, model: &NoiseSpec, rng: &mut R) -> Result<DetectorMap> {
    model.validate()?;
    let mut out = d.clone();
    if model.is_noiseless() {
        return Ok(out);
    }
    for r in out.readings_mut() {
        if r.power_scale == 0.0 {
            continue;
        }
        r.power = model.perturb(r.power / r.power_scale, rng) * r.power_scale;
    }
    Ok(out)
}

pub fn noisy_readout(d: &DetectorMap, model: &NoiseSpec, seed: u64) -> Result<DetectorMap> {
    noisy_readout_with(d, model, &mut rng_from_seed(seed))
}

/// Amplitudes of `pol ⊗ ψ` for a basis spatial mode, convenient in tests.
pub fn mode_content(pol: [C64; 2], spatial_mode: usize) -> TwoQubitAmplitudes {
    let spa = if spatial_mode == 0 { [c(1.0, 0.0), c(0.0, 0.0)] } else { [c(0.0, 0.0), c(1.0, 0.0)] };
    TwoQubitAmplitudes::product(pol, spa)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::kets;

    fn field(a: TwoQubitAmplitudes) -> PortField {
        PortField::new(a, "in")
    }

    #[test]
    fn mirror_signs() {
        let out = mirror(&field(mode_content(kets::zero(), 1)));
        assert!(out.amplitudes.max_abs_diff(&mode_content(kets::zero(), 1).scale(c(0.0, -1.0))) < 1e-15);
        let out = mirror(&field(mode_content(kets::one(), 1)));
        assert!(out.amplitudes.max_abs_diff(&mode_content(kets::one(), 1).scale(c(0.0, 1.0))) < 1e-15);
        let m = mirror_operator();
        assert!((m * m).approx_eq(&Complex4x4::identity().scale(c(-1.0, 0.0)), 1e-15));
    }

    #[test]
    fn hwp_matches_converter() {
        let e = radial_beam();
        let out = inline_hwp(&field(e));
        assert!(out.amplitudes.max_abs_diff(&apply_to_pol(&converter(Retardance::Pi), &e)) < 1e-15);
        let out = inline_hwp(&field(mode_content(kets::zero(), 0)));
        assert!(out.amplitudes.max_abs_diff(&mode_content(kets::zero(), 0).scale(c(0.0, -1.0))) < 1e-15);
    }

    #[test]
    fn beamsplitter_halves_power() {
        let e = field(mode_content(kets::zero(), 0));
        let (o1, o2) = beamsplitter50(&e, &PortField::vacuum("v"));
        assert!((o1.power() - 0.5).abs() < 1e-15 && (o2.power() - 0.5).abs() < 1e-15);
        // Reflected e_x ψ10: −i from the x-row, −1 from ψ10 under x → −x.
        let want = mode_content(kets::zero(), 0).scale(c(0.0, FRAC_1_SQRT_2));
        assert!(o2.amplitudes.max_abs_diff(&want) < 1e-15);
    }

    #[test]
    fn mbs_routes_modes() {
        for pol in [kets::zero(), kets::one()] {
            let (p1, p2) = mode_beam_splitter(&field(mode_content(pol, 0)));
            assert!((p1.power() - 1.0).abs() < 1e-12 && p2.amplitudes.norm_sqr().sqrt() < 1e-12);
            let (p1, p2) = mode_beam_splitter(&field(mode_content(pol, 1)));
            assert!((p2.power() - 1.0).abs() < 1e-12 && p1.amplitudes.norm_sqr().sqrt() < 1e-12);
        }
    }

    #[test]
    fn mbs_radial_beam() {
        let (n1, n2) = mode_beam_splitter_net(&field(radial_beam()));
        let h = FRAC_1_SQRT_2;
        let z = c(0.0, 0.0);
        assert!(n1.amplitudes.max_abs_diff(&TwoQubitAmplitudes([c(-h, 0.0), z, z, z])) < 1e-15);
        assert!(n2.amplitudes.max_abs_diff(&TwoQubitAmplitudes([z, z, z, c(h, 0.0)])) < 1e-15);
        let (p1, p2) = mode_beam_splitter(&field(radial_beam()));
        assert!(p1.amplitudes.distance_up_to_phase(&n1.amplitudes) < 1e-12);
        assert!(p2.amplitudes.distance_up_to_phase(&n2.amplitudes) < 1e-12);
    }

    #[test]
    fn mode_converter_examples() {
        let b = mode_converter(ModeConverter::B, &field(TwoQubitAmplitudes::product(kets::zero(), kets::plus())));
        assert!(b.amplitudes.max_abs_diff(&mode_content(kets::zero(), 0).scale(c(0.0, -1.0))) < 1e-14);
        let a = mode_converter(ModeConverter::A, &field(TwoQubitAmplitudes::product(kets::one(), kets::left())));
        assert!(a.amplitudes.max_abs_diff(&mode_content(kets::one(), 0)) < 1e-14);
        let e = radial_beam();
        assert_eq!(mode_converter(ModeConverter::C, &field(e)).amplitudes, e);
    }

    #[test]
    fn cpm_single_port_branches() {
        let r = cpm(&field(mode_content(kets::zero(), 0)));
        assert!((r.primary[0].power - 1.0 / 3.0).abs() < 1e-15 && r.primary[1].power.abs() < 1e-15);
        let r = cpm(&field(mode_content(kets::left(), 0)));
        assert!((r.primary[3].power - 1.0 / 3.0).abs() < 1e-14 && r.right.power.abs() < 1e-14);
        let r = cpm(&field(mode_content(kets::plus(), 0)));
        assert!((r.primary[2].power - 1.0 / 3.0).abs() < 1e-14 && r.minus.power.abs() < 1e-14);
    }

    #[test]
    fn detector_counts() {
        let d = full_bench(&Sample::Jones(Complex2x2::identity()));
        assert_eq!(d.readings().count(), 26);
        assert_eq!(d.auxiliary.len(), DetectorMap::AUX_COUNT);
        assert!((d.total_power() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn calibrate_dark_and_zero_scale() {
        let mut d = full_bench(&Sample::Jones(Complex2x2::zero()));
        let i = calibrate(&d).unwrap();
        assert_eq!(i.0, crate::algebra::Real4x4::zero());
        d.primary[2][1].power_scale = 0.0;
        assert!(matches!(calibrate(&d), Err(Error::InconsistentScale { label }) if label == "21"));
    }

    #[test]
    fn noise_spec_validation() {
        assert!(NoiseSpec { sigma_rel: -1.0, ..Default::default() }.validate().is_err());
        assert!(NoiseSpec { dark: -1e-3, ..Default::default() }.validate().is_err());
        assert!(NoiseSpec { photons: Some(0.0), ..Default::default() }.validate().is_err());
        let d = full_bench(&Sample::Jones(Complex2x2::identity()));
        assert_eq!(noisy_readout(&d, &NoiseSpec::default(), 3).unwrap(), d);
        let a = noisy_readout(&d, &NoiseSpec::relative(1e-3), 3).unwrap();
        let b = noisy_readout(&d, &NoiseSpec::relative(1e-3), 3).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, d);
        assert!(a.is_nonnegative());
    }

    #[test]
    fn bench_recovers_hwp() {
        let t = rotated(&converter(Retardance::Pi), FRAC_PI_8);
        let m = bench_mueller(&Sample::Jones(t)).unwrap();
        assert!(m.max_abs_error(&crate::polarimetry::mueller_from_jones(&t)) < 1e-12);
        let i = calibrate(&full_bench(&Sample::Jones(t))).unwrap();
        assert!((i.0[(0, 0)] - 0.25).abs() < 1e-12 && (i.0[(2, 0)] - 0.5).abs() < 1e-12);
    }
}
