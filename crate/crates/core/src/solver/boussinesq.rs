use std::sync::Arc;

use num_complex::Complex64;

use super::ifrk::{ifrk_step, Scheme, Spectra};
use crate::error::{argument, Error, Result};
use crate::lagrangian::{
    advect_level_set, advect_markers, departure_points, evolve_x_eulerian, advect_monotone,
    GriddedFlow, LevelSet, MarkerScheme, PatchState, TimeLinearFlow,
};
use crate::spectral::{
    biot_savart, dealias, divergence, gradient, mollify, ops::advective_derivative, partial, Axis, GridRef,
    ScalarField, VectorField2,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThetaAdvection {
    /// Backward-RK2 characteristics with monotone cubic interpolation.
    SemiLagrangian,
    /// Pseudo-spectral transport inside the Runge–Kutta stages.
    Spectral,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum XAdvection {
    /// `∂_t X = -P(u·∇X) + P(X·∇u)` inside the Runge–Kutta stages.
    Spectral,
    /// Characteristics with the flow-map Jacobian after each step.
    SemiLagrangian,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepperConfig {
    pub dt: f64,
    pub cfl: f64,
    pub scheme: Scheme,
    pub theta_advection: ThetaAdvection,
    pub x_advection: XAdvection,
    pub marker_scheme: MarkerScheme,
    /// Standard deviation of the buoyancy mollifier in grid spacings.
    pub mollifier_width: f64,
    /// Evaluate `u·∇ω` as `div(uω)`.
    pub conservative: bool,
    /// Drop the transporting velocity (test switch).
    pub linearized: bool,
    pub max_halvings: u32,
}

impl Default for StepperConfig {
    fn default() -> Self {
        Self {
            dt: 0.0025,
            cfl: 0.5,
            scheme: Scheme::Ifrk2,
            theta_advection: ThetaAdvection::SemiLagrangian,
            x_advection: XAdvection::Spectral,
            marker_scheme: MarkerScheme::Rk3,
            mollifier_width: 2.0,
            conservative: false,
            linearized: false,
            max_halvings: 6,
        }
    }
}

impl StepperConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return argument(format!("dt must be > 0, got {}", self.dt));
        }
        if !(self.cfl > 0.0 && self.cfl <= 0.5) {
            return argument(format!("cfl must lie in (0, 0.5], got {}", self.cfl));
        }
        if !(self.mollifier_width >= 0.0) {
            return argument("mollifier width must be >= 0");
        }
        Ok(())
    }
}

/// Time plus the prognostic fields; `u` always equals `biot_savart(omega)`.
#[derive(Debug, Clone)]
pub struct SimState {
    pub t: f64,
    pub nu: f64,
    pub theta: ScalarField,
    pub omega: ScalarField,
    pub u: VectorField2,
    pub x: VectorField2,
    pub levelset: Option<LevelSet>,
}

impl SimState {
    /// The vorticity is projected onto the retained band with its mean
    /// removed.
    pub fn new(nu: f64, theta: ScalarField, omega: ScalarField, x: VectorField2, levelset: Option<LevelSet>) -> Result<Self> {
        if !(nu > 0.0 && nu.is_finite()) {
            return argument(format!("viscosity must be > 0, got {nu}"));
        }
        if !theta.same_grid(&omega) || !theta.same_grid(&x.x) || !x.x.same_grid(&x.y) {
            return Err(Error::GridMismatch);
        }
        let omega = pin_mean(&dealias(&omega));
        Ok(Self {
            t: 0.0,
            nu,
            u: biot_savart(&omega),
            theta,
            omega,
            x,
            levelset,
        })
    }

    pub fn grid(&self) -> &GridRef {
        self.omega.grid()
    }
}

fn pin_mean(f: &ScalarField) -> ScalarField {
    let mut s = f.spectrum().to_vec();
    s[0] = Complex64::new(0.0, 0.0);
    ScalarField::from_spectrum(f.grid(), s).expect("finite input")
}

fn is_zero(v: &VectorField2) -> bool {
    v.x.values().iter().chain(v.y.values()).all(|&a| a == 0.0)
}

pub type Forcing = Arc<dyn Fn(f64) -> ScalarField + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepInfo {
    pub step: usize,
    pub t: f64,
    pub dt: f64,
    pub halvings: u32,
    pub redistributed: bool,
}

/// Owns the state of one run and advances it step by step.
pub struct Simulation {
    pub state: SimState,
    pub patch: Option<PatchState>,
    pub config: StepperConfig,
    /// Extra vorticity source `F(t)`, used by manufactured-solution tests.
    pub forcing: Option<Forcing>,
    prev_u: Option<(f64, VectorField2)>,
    flow: Option<Arc<GriddedFlow>>,
    steps: usize,
}

impl Simulation {
    pub fn new(state: SimState, patch: Option<PatchState>, config: StepperConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self {
            state,
            patch,
            config,
            forcing: None,
            prev_u: None,
            flow: None,
            steps: 0,
        })
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn grid(&self) -> GridRef {
        self.state.grid().clone()
    }

    /// Mollified temperature as it enters the buoyancy term.
    pub fn buoyancy_theta(&self, theta: &ScalarField) -> ScalarField {
        mollify(theta, self.config.mollifier_width * theta.grid().spacing())
    }

    fn needs_flow(&self) -> bool {
        self.patch.is_some() || self.state.levelset.is_some() || self.config.x_advection == XAdvection::SemiLagrangian
    }

    /// Takes one step, never past `t_end`.
    pub fn advance(&mut self, t_end: f64) -> Result<StepInfo> {
        let grid = self.grid();
        let h = grid.spacing();
        let t = self.state.t;
        let umax = self.state.u.max_norm();
        let mut dt = self.config.dt;
        if umax > 0.0 {
            dt = dt.min(self.config.cfl * h / umax);
        }
        if t_end > t {
            dt = dt.min(t_end - t);
        }
        let mut halvings = 0;
        loop {
            let trial = self.trial_step(dt)?;
            let umax1 = trial.u.max_norm();
            if dt * umax1 / h <= 2.0 * self.config.cfl {
                let redistributed = self.commit(trial, dt)?;
                self.steps += 1;
                return Ok(StepInfo {
                    step: self.steps,
                    t: self.state.t,
                    dt,
                    halvings,
                    redistributed,
                });
            }
            if halvings >= self.config.max_halvings {
                return Err(Error::StepFailure {
                    t,
                    dt,
                    max_velocity: umax1,
                    reason: format!("CFL limit violated after {halvings} halvings"),
                });
            }
            halvings += 1;
            dt *= 0.5;
        }
    }

    fn commit(&mut self, mut next: SimState, dt: f64) -> Result<bool> {
        let t = self.state.t;
        let mut redistributed = false;
        if self.needs_flow() {
            let a = match &self.flow {
                Some(f) => f.clone(),
                None => Arc::new(GriddedFlow::from_vorticity(&self.state.omega)),
            };
            let b = Arc::new(GriddedFlow::from_vorticity(&next.omega));
            let flow = TimeLinearFlow {
                t0: t,
                t1: t + dt,
                a,
                b: b.clone(),
            };
            if self.config.x_advection == XAdvection::SemiLagrangian && !is_zero(&self.state.x) {
                next.x = evolve_x_eulerian(&self.state.x, &flow, t, dt)?;
            }
            if let Some(ls) = &self.state.levelset {
                next.levelset = Some(advect_level_set(ls, &flow, t, dt));
            }
            if let Some(patch) = &mut self.patch {
                redistributed = advect_markers(patch, &flow, dt, self.config.marker_scheme, Some(&next.x))?;
            }
            self.flow = Some(b);
        }
        let old = std::mem::replace(&mut self.state, next);
        self.prev_u = Some((t, old.u));
        Ok(redistributed)
    }

    /// Candidate state at `t + dt`; `self` is left untouched.
    fn trial_step(&self, dt: f64) -> Result<SimState> {
        let s = &self.state;
        let grid = s.grid().clone();
        let t = s.t;
        let cfg = &self.config;
        let lin = cfg.linearized;
        let theta_const = s.theta.is_uniform();
        let spectral_theta = cfg.theta_advection == ThetaAdvection::Spectral && !theta_const;
        let track_x = cfg.x_advection == XAdvection::Spectral && !is_zero(&s.x);

        // Temperature by characteristics, before the vorticity stages.
        let theta_next = if theta_const || spectral_theta || lin {
            s.theta.clone()
        } else {
            let u_half = match &self.prev_u {
                Some((tp, up)) if s.t > *tp => {
                    let w = 0.5 * dt / (s.t - tp);
                    s.u.add(&s.u.sub(up).scaled(w))
                }
                _ => s.u.clone(),
            };
            advect_monotone(&s.theta, &departure_points(&grid, &u_half, dt))
        };
        let width = cfg.mollifier_width * grid.spacing();
        let buoy = |th: &ScalarField| partial(&mollify(th, width), Axis::X);
        let (b0, b1) = if theta_const || spectral_theta {
            (None, None)
        } else {
            (Some(buoy(&s.theta)), Some(buoy(&theta_next)))
        };

        let mut nus = vec![s.nu];
        let mut y: Spectra = vec![s.omega.spectrum().to_vec()];
        if spectral_theta {
            nus.push(0.0);
            y.push(s.theta.spectrum().to_vec());
        }
        let x_at = y.len();
        if track_x {
            nus.extend([0.0, 0.0]);
            y.push(s.x.x.spectrum().to_vec());
            y.push(s.x.y.spectrum().to_vec());
        }

        let zero = Complex64::new(0.0, 0.0);
        let mut rhs = |y: &Spectra, ts: f64| -> Result<Spectra> {
            let omega = dealias(&ScalarField::from_spectrum_trusted(&grid, y[0].clone()));
            let u = if lin { VectorField2::zeros(&grid) } else { biot_savart(&omega) };
            let mut out = Vec::with_capacity(y.len());
            let mut n_omega = if lin {
                ScalarField::zeros(&grid)
            } else if cfg.conservative {
                divergence(&VectorField2 {
                    x: u.x.mul_pointwise(&omega),
                    y: u.y.mul_pointwise(&omega),
                })
                .scaled(-1.0)
            } else {
                advective_derivative(&u, &omega).scaled(-1.0)
            };
            if spectral_theta {
                let th = ScalarField::from_spectrum_trusted(&grid, y[1].clone());
                n_omega = n_omega.add(&buoy(&th));
            } else if let (Some(a), Some(b)) = (&b0, &b1) {
                let l = (ts - t) / dt;
                n_omega = n_omega.add(&a.scaled(1.0 - l).add(&b.scaled(l)));
            }
            if let Some(f) = &self.forcing {
                n_omega = n_omega.add(&dealias(&f(ts)));
            }
            let mut n0 = n_omega.spectrum().to_vec();
            n0[0] = zero;
            out.push(n0);
            if spectral_theta {
                let th = dealias(&ScalarField::from_spectrum_trusted(&grid, y[1].clone()));
                out.push(if lin {
                    vec![zero; grid.len()]
                } else {
                    advective_derivative(&u, &th).scaled(-1.0).spectrum().to_vec()
                });
            }
            if track_x {
                let xs = [
                    dealias(&ScalarField::from_spectrum_trusted(&grid, y[x_at].clone())),
                    dealias(&ScalarField::from_spectrum_trusted(&grid, y[x_at + 1].clone())),
                ];
                let gu = [gradient(&u.x), gradient(&u.y)];
                for i in 0..2 {
                    // (∂_X u)^i = X^j ∂_j u^i
                    let stretch = dealias(&xs[0].mul_pointwise(&gu[i].x).add(&xs[1].mul_pointwise(&gu[i].y)));
                    let adv = if lin { ScalarField::zeros(&grid) } else { advective_derivative(&u, &xs[i]) };
                    out.push(stretch.sub(&adv).spectrum().to_vec());
                }
            }
            Ok(out)
        };

        let mut ynew = ifrk_step(&grid, &nus, cfg.scheme, &y, t, dt, &mut rhs)?;
        ynew[0][0] = zero;
        let omega = ScalarField::from_spectrum(&grid, std::mem::take(&mut ynew[0]))?;
        let theta = if spectral_theta {
            ScalarField::from_spectrum(&grid, std::mem::take(&mut ynew[1]))?
        } else {
            if theta_next.values().iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite("temperature".into()));
            }
            theta_next
        };
        let x = if track_x {
            VectorField2 {
                x: ScalarField::from_spectrum(&grid, std::mem::take(&mut ynew[x_at]))?,
                y: ScalarField::from_spectrum(&grid, std::mem::take(&mut ynew[x_at + 1]))?,
            }
        } else {
            s.x.clone()
        };
        Ok(SimState {
            t: t + dt,
            nu: s.nu,
            u: biot_savart(&omega),
            theta,
            omega,
            x,
            levelset: None,
        })
    }
}
