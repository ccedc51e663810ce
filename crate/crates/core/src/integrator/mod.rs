//! Time integration: exact linear propagators, Lawson RK4 and dense Strang
//! splitting steppers, sampled trajectories and lifespan probes.

pub mod expm;
mod lifespan;
mod propagator;
mod simulate;
mod stepper;

pub use lifespan::{lifespan_probe, loglog_slope, LifespanCause, LifespanResult};
pub use propagator::{frequency, linear_propagator, phase_factors, LinearPropagator, PropagatorMode};
pub use simulate::{derivative, simulate, simulate_tracking, DamperInfo, Sidecar, Termination, Tracked, TrackedNorm, TrajectoryRecord};
pub use stepper::{step, Integrator, Scheme, StepperConfig, BLOW_UP_NORM};
