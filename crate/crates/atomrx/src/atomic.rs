//! Four-level ladder system and Lindblad master equation.
//!
//! Levels are numbered |1>..|4|: ground, probe-excited, first Rydberg, second
//! Rydberg. The probe laser couples 1-2, the coupling laser 2-3, and the
//! microwave field 3-4. All frequencies and rates are angular (rad/s); the
//! scenario layer converts from Hz exactly once at parse time.

use crate::linalg::{solve_dense, Mat4, DIM};
use num_complex::Complex64 as C64;
use thiserror::Error;

/// Floor on the integrator step; below this the system is declared too stiff.
pub const DT_FLOOR: f64 = 1e-16;

/// Decay-channel pairs (upper -> lower) matching the `gamma` array:
/// 2->1, 3->2, 4->3.
const DECAY_CHANNELS: [(usize, usize); 3] = [(1, 0), (2, 1), (3, 2)];

/// Coherence index pairs (i < j, zero-based) matching the `gamma_deph` array:
/// (1,2), (1,3), (1,4), (2,3), (2,4), (3,4) in one-based level labels.
pub const COHERENCE_PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

#[derive(Debug, Error, PartialEq)]
pub enum SolverError {
    /// No unique steady state (e.g. all decay rates zero).
    #[error("singular Liouvillian: no unique steady state")]
    SingularLiouvillian,
    /// Stiffness forces the integrator step below [`DT_FLOOR`].
    #[error("integrator step size {0:.3e} s underflows the {DT_FLOOR:.0e} s floor")]
    StepSizeUnderflow(f64),
    #[error("invalid ladder system: {0}")]
    InvalidSystem(String),
}

/// Parameters of the four-level ladder: detunings, Rabi frequencies and
/// dissipation rates, all in rad/s.
///
/// Rabi frequencies are magnitudes (phases are carried by the heterodyne
/// layer) and every rate is nonnegative.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LadderSystem {
    /// Probe detuning.
    pub delta_p: f64,
    /// Coupling detuning.
    pub delta_c: f64,
    /// Microwave detuning.
    pub delta_mw: f64,
    /// Probe Rabi frequency.
    pub omega_p: f64,
    /// Coupling Rabi frequency.
    pub omega_c: f64,
    /// Microwave Rabi frequency.
    pub omega_mw: f64,
    /// Population decay rates per downward channel: 2->1, 3->2, 4->3.
    pub gamma: [f64; 3],
    /// Extra pure dephasing per coherence, ordered as [`COHERENCE_PAIRS`].
    pub gamma_deph: [f64; 6],
}

impl Default for LadderSystem {
    fn default() -> Self {
        LadderSystem {
            delta_p: 0.0,
            delta_c: 0.0,
            delta_mw: 0.0,
            omega_p: 0.0,
            omega_c: 0.0,
            omega_mw: 0.0,
            gamma: [0.0; 3],
            gamma_deph: [0.0; 6],
        }
    }
}

impl LadderSystem {
    /// Check the type invariants: rates and Rabi frequencies nonnegative and
    /// finite.
    pub fn validate(&self) -> Result<(), SolverError> {
        let named = [
            ("omega_p", self.omega_p),
            ("omega_c", self.omega_c),
            ("omega_mw", self.omega_mw),
        ];
        for (name, v) in named {
            if !v.is_finite() || v < 0.0 {
                return Err(SolverError::InvalidSystem(format!(
                    "{name} must be finite and >= 0, got {v}"
                )));
            }
        }
        for (i, g) in self.gamma.iter().enumerate() {
            if !g.is_finite() || *g < 0.0 {
                return Err(SolverError::InvalidSystem(format!(
                    "gamma[{i}] must be finite and >= 0, got {g}"
                )));
            }
        }
        for (i, g) in self.gamma_deph.iter().enumerate() {
            if !g.is_finite() || *g < 0.0 {
                return Err(SolverError::InvalidSystem(format!(
                    "gamma_deph[{i}] must be finite and >= 0, got {g}"
                )));
            }
        }
        for (name, v) in [
            ("delta_p", self.delta_p),
            ("delta_c", self.delta_c),
            ("delta_mw", self.delta_mw),
        ] {
            if !v.is_finite() {
                return Err(SolverError::InvalidSystem(format!("{name} must be finite")));
            }
        }
        Ok(())
    }

    /// Magnitude scale of the fastest dynamics, used to bound integrator steps.
    pub fn rate_scale(&self) -> f64 {
        let d2 = self.delta_p.abs();
        let d3 = (self.delta_p + self.delta_c).abs();
        let d4 = (self.delta_p + self.delta_c + self.delta_mw).abs();
        let omega = self.omega_p + self.omega_c + self.omega_mw;
        let gamma: f64 = self.gamma.iter().sum();
        let deph = self.gamma_deph.iter().cloned().fold(0.0, f64::max);
        d2.max(d3).max(d4) + omega + gamma + deph
    }
}

/// 4x4 density matrix: Hermitian, unit trace, positive semidefinite.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensityMatrix {
    rho: Mat4,
}

impl DensityMatrix {
    /// Pure state |level><level| (zero-based level index).
    pub fn pure(level: usize) -> Self {
        assert!(level < DIM, "level index out of range");
        DensityMatrix {
            rho: Mat4::basis(level, level),
        }
    }

    /// Ground state |1><1|.
    pub fn ground() -> Self {
        DensityMatrix::pure(0)
    }

    /// Wrap a raw matrix, symmetrizing and renormalizing the trace.
    pub fn from_matrix(m: Mat4) -> Self {
        let h = m.hermitize();
        let tr = h.trace().re;
        let rho = if tr.abs() > 1e-300 {
            h.scale_re(1.0 / tr)
        } else {
            h
        };
        DensityMatrix { rho }
    }

    pub fn matrix(&self) -> &Mat4 {
        &self.rho
    }

    pub fn element(&self, row: usize, col: usize) -> C64 {
        self.rho.get(row, col)
    }

    pub fn population(&self, level: usize) -> f64 {
        self.rho.get(level, level).re
    }

    pub fn trace(&self) -> f64 {
        self.rho.trace().re
    }

    pub fn hermiticity_error(&self) -> f64 {
        self.rho.hermiticity_error()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.rho.hermitian_eigenvalues()[0]
    }

    /// Largest elementwise distance to another density matrix.
    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        self.rho.sub(&other.rho).max_abs()
    }

    /// Verify the type invariants: Hermitian to 1e-12, trace 1 to 1e-10,
    /// real diagonal in [0, 1], eigenvalues >= -1e-10.
    pub fn validate(&self) -> Result<(), String> {
        let herm = self.hermiticity_error();
        if herm > 1e-12 {
            return Err(format!("hermiticity error {herm:.3e} exceeds 1e-12"));
        }
        let tr = self.rho.trace();
        if (tr.re - 1.0).abs() > 1e-10 || tr.im.abs() > 1e-10 {
            return Err(format!("trace {tr} deviates from 1 beyond 1e-10"));
        }
        for i in 0..DIM {
            let d = self.rho.get(i, i);
            if d.im.abs() > 1e-12 || d.re < -1e-10 || d.re > 1.0 + 1e-10 {
                return Err(format!("diagonal element {i} = {d} outside [0, 1]"));
            }
        }
        let min_eig = self.min_eigenvalue();
        if min_eig < -1e-10 {
            return Err(format!("minimum eigenvalue {min_eig:.3e} below -1e-10"));
        }
        Ok(())
    }
}

/// Rabi frequency (rad/s) at the center of a Gaussian beam of total power
/// `power_w` focused to waist `waist_m`, driving a transition with dipole
/// moment `dipole_moment_cm` (C*m).
///
/// Peak intensity of a Gaussian beam is `2P/(pi w^2)`, so the peak field is
/// `sqrt(4P / (pi w^2 eps0 c))` and `omega = mu E / hbar`. The waist is not
/// something this crate can know; callers who prefer to state Rabi
/// frequencies directly should just do that.
pub fn rabi_from_beam_power(power_w: f64, waist_m: f64, dipole_moment_cm: f64) -> f64 {
    assert!(power_w >= 0.0 && waist_m > 0.0 && dipole_moment_cm > 0.0);
    const EPS0: f64 = 8.8541878128e-12;
    const C_LIGHT: f64 = 299_792_458.0;
    const HBAR: f64 = 1.054571817e-34;
    let field =
        (4.0 * power_w / (std::f64::consts::PI * waist_m * waist_m * EPS0 * C_LIGHT)).sqrt();
    dipole_moment_cm * field / HBAR
}

/// Rotating-wave Hamiltonian of the ladder, divided by hbar (units rad/s).
///
/// Diagonal `(0, -dp, -(dp+dc), -(dp+dc+dmw))` with symmetric couplings
/// `omega/2` on the 1-2, 2-3 and 3-4 bonds. Hermitian by construction.
pub fn build_hamiltonian(sys: &LadderSystem) -> Mat4 {
    let mut h = Mat4::zeros();
    let d2 = -sys.delta_p;
    let d3 = -(sys.delta_p + sys.delta_c);
    let d4 = -(sys.delta_p + sys.delta_c + sys.delta_mw);
    h.set(1, 1, C64::new(d2, 0.0));
    h.set(2, 2, C64::new(d3, 0.0));
    h.set(3, 3, C64::new(d4, 0.0));
    for (omega, (i, j)) in [
        (sys.omega_p, (0, 1)),
        (sys.omega_c, (1, 2)),
        (sys.omega_mw, (2, 3)),
    ] {
        let half = C64::new(omega / 2.0, 0.0);
        h.set(i, j, half);
        h.set(j, i, half);
    }
    h
}

/// Right-hand side of the master equation: `-i [H, rho] + dissipator(rho)`.
///
/// Decay channels lower each bond (2->1, 3->2, 4->3) at the configured rates;
/// extra per-coherence dephasing damps off-diagonal elements directly. The
/// result is traceless and Hermitian for Hermitian input.
pub fn lindblad_rhs(sys: &LadderSystem, rho: &DensityMatrix) -> Mat4 {
    lindblad_map(sys, rho.matrix())
}

/// The same superoperator applied to an arbitrary (not necessarily Hermitian)
/// matrix; used both by the solvers and to assemble the vectorized Liouvillian
/// column by column.
fn lindblad_map(sys: &LadderSystem, rho: &Mat4) -> Mat4 {
    let h = build_hamiltonian(sys);
    let minus_i = C64::new(0.0, -1.0);
    let mut out = h.commutator(rho).scale(minus_i);

    // Lindblad decay channels C = |lower><upper|:
    //   D(rho) = gamma * (C rho C^dag - {C^dag C, rho} / 2)
    // which for projector-like C reduces to population transfer plus damping
    // of the upper level's row and column.
    for (k, (upper, lower)) in DECAY_CHANNELS.iter().enumerate() {
        let gamma = sys.gamma[k];
        if gamma == 0.0 {
            continue;
        }
        let feed = rho.get(*upper, *upper);
        let mut v = out.get(*lower, *lower) + C64::new(gamma, 0.0) * feed;
        out.set(*lower, *lower, v);
        for j in 0..DIM {
            let half = gamma / 2.0;
            v = out.get(*upper, j) - C64::new(half, 0.0) * rho.get(*upper, j);
            out.set(*upper, j, v);
            v = out.get(j, *upper) - C64::new(half, 0.0) * rho.get(j, *upper);
            out.set(j, *upper, v);
        }
        // The two loops above each damped the (upper, upper) element by
        // gamma/2, totaling the required gamma.
    }

    for (k, (i, j)) in COHERENCE_PAIRS.iter().enumerate() {
        let deph = sys.gamma_deph[k];
        if deph == 0.0 {
            continue;
        }
        let mut v = out.get(*i, *j) - C64::new(deph, 0.0) * rho.get(*i, *j);
        out.set(*i, *j, v);
        v = out.get(*j, *i) - C64::new(deph, 0.0) * rho.get(*j, *i);
        out.set(*j, *i, v);
    }

    out
}

/// Steady state of the master equation.
///
/// Vectorizes the Liouvillian into a 16x16 complex system, replaces the row
/// for d(rho_11)/dt with the unit-trace constraint, and solves by LU with
/// partial pivoting. Requires at least one decay rate > 0; otherwise the
/// Liouvillian has no unique null vector and `SingularLiouvillian` is
/// returned.
pub fn steady_state(sys: &LadderSystem) -> Result<DensityMatrix, SolverError> {
    sys.validate()?;
    let n = DIM * DIM;
    let mut matrix = vec![C64::new(0.0, 0.0); n * n];

    // Column for basis element |i><j| is the vectorized image of the map.
    for i in 0..DIM {
        for j in 0..DIM {
            let col = i * DIM + j;
            let image = lindblad_map(sys, &Mat4::basis(i, j));
            for r in 0..DIM {
                for c in 0..DIM {
                    matrix[(r * DIM + c) * n + col] = image.get(r, c);
                }
            }
        }
    }

    // Trace constraint replaces the redundant rho_11 row.
    let mut b = vec![C64::new(0.0, 0.0); n];
    for cell in matrix.iter_mut().take(n) {
        *cell = C64::new(0.0, 0.0);
    }
    for k in 0..DIM {
        matrix[k * DIM + k] = C64::new(1.0, 0.0);
    }
    b[0] = C64::new(1.0, 0.0);

    let x = solve_dense(&mut matrix, &mut b, n).ok_or(SolverError::SingularLiouvillian)?;

    let mut rho = Mat4::zeros();
    for i in 0..DIM {
        for j in 0..DIM {
            rho.set(i, j, x[i * DIM + j]);
        }
    }
    let rho = DensityMatrix::from_matrix(rho);

    // The LU can "solve" nearly singular systems to garbage; reject unless
    // the result actually annihilates the generator.
    let residual = lindblad_rhs(sys, &rho).max_abs();
    let scale = sys.rate_scale().max(1.0);
    if !residual.is_finite() || residual > 1e-9 * scale {
        return Err(SolverError::SingularLiouvillian);
    }
    Ok(rho)
}

/// Fixed-step RK4 integration of the master equation over `duration`.
///
/// The step is the smaller of `dt_max` and a stability bound tied to the
/// fastest system rate; each step re-Hermitizes and renormalizes the trace
/// (drift per step stays below 1e-9). `duration == 0` returns the input.
pub fn evolve(
    sys: &LadderSystem,
    rho0: &DensityMatrix,
    duration: f64,
    dt_max: f64,
) -> Result<DensityMatrix, SolverError> {
    sys.validate()?;
    assert!(duration >= 0.0, "duration must be >= 0");
    assert!(dt_max > 0.0, "dt_max must be > 0");
    if duration == 0.0 {
        return Ok(*rho0);
    }
    let dt = stable_step(sys, dt_max)?;
    let n_steps = (duration / dt).ceil() as u64;
    let h = duration / n_steps as f64;
    let mut rho = *rho0.matrix();
    for _ in 0..n_steps {
        rho = rk4_step(|m| lindblad_map(sys, m), &rho, h);
        rho = renormalize(rho);
    }
    Ok(DensityMatrix { rho })
}

/// Integrate with a time-dependent system description `sys_at(t)` from `t0`
/// to `t1`, starting from `rho0`. The step bound uses the system at `t0`;
/// drives are assumed not to add new fast scales mid-interval.
pub fn evolve_driven(
    sys_at: &impl Fn(f64) -> LadderSystem,
    rho0: &DensityMatrix,
    t0: f64,
    t1: f64,
    dt_max: f64,
) -> Result<DensityMatrix, SolverError> {
    assert!(t1 >= t0, "t1 must be >= t0");
    assert!(dt_max > 0.0, "dt_max must be > 0");
    if t1 == t0 {
        return Ok(*rho0);
    }
    let sys0 = sys_at(t0);
    sys0.validate()?;
    let dt = stable_step(&sys0, dt_max)?;
    let n_steps = ((t1 - t0) / dt).ceil() as u64;
    let h = (t1 - t0) / n_steps as f64;
    let mut rho = *rho0.matrix();
    let mut t = t0;
    for _ in 0..n_steps {
        let k1 = lindblad_map(&sys_at(t), &rho);
        let sys_mid = sys_at(t + h / 2.0);
        let k2 = lindblad_map(&sys_mid, &rho.add(&k1.scale_re(h / 2.0)));
        let k3 = lindblad_map(&sys_mid, &rho.add(&k2.scale_re(h / 2.0)));
        let k4 = lindblad_map(&sys_at(t + h), &rho.add(&k3.scale_re(h)));
        rho = combine_rk4(&rho, &k1, &k2, &k3, &k4, h);
        rho = renormalize(rho);
        t += h;
    }
    Ok(DensityMatrix { rho })
}

fn stable_step(sys: &LadderSystem, dt_max: f64) -> Result<f64, SolverError> {
    let scale = sys.rate_scale();
    let dt = if scale > 0.0 {
        dt_max.min(0.2 / scale)
    } else {
        dt_max
    };
    if dt < DT_FLOOR {
        return Err(SolverError::StepSizeUnderflow(dt));
    }
    Ok(dt)
}

fn rk4_step(rhs: impl Fn(&Mat4) -> Mat4, rho: &Mat4, h: f64) -> Mat4 {
    let k1 = rhs(rho);
    let k2 = rhs(&rho.add(&k1.scale_re(h / 2.0)));
    let k3 = rhs(&rho.add(&k2.scale_re(h / 2.0)));
    let k4 = rhs(&rho.add(&k3.scale_re(h)));
    combine_rk4(rho, &k1, &k2, &k3, &k4, h)
}

fn combine_rk4(rho: &Mat4, k1: &Mat4, k2: &Mat4, k3: &Mat4, k4: &Mat4, h: f64) -> Mat4 {
    let sum = k1.add(&k2.scale_re(2.0)).add(&k3.scale_re(2.0)).add(k4);
    rho.add(&sum.scale_re(h / 6.0))
}

fn renormalize(rho: Mat4) -> Mat4 {
    let h = rho.hermitize();
    let tr = h.trace().re;
    h.scale_re(1.0 / tr)
}
