use super::boussinesq::{Simulation, StepInfo};
use crate::error::Result;

/// Receives the simulation after setup and after every accepted step.
pub trait RunSink {
    /// `info` is `None` for the initial call.
    fn observe(&mut self, sim: &Simulation, info: Option<&StepInfo>) -> Result<()>;
}

impl<F: FnMut(&Simulation, Option<&StepInfo>) -> Result<()>> RunSink for F {
    fn observe(&mut self, sim: &Simulation, info: Option<&StepInfo>) -> Result<()> {
        self(sim, info)
    }
}

/// Steps until `t_final`. On failure the simulation keeps its last valid state.
pub fn run(sim: &mut Simulation, t_final: f64, sink: &mut dyn RunSink) -> Result<usize> {
    sink.observe(sim, None)?;
    let eps = 1e-12 * t_final.abs().max(1.0);
    let mut steps = 0;
    while sim.state.t < t_final - eps {
        let info = sim.advance(t_final)?;
        if t_final - sim.state.t <= eps {
            sim.state.t = t_final;
        }
        steps += 1;
        sink.observe(sim, Some(&info))?;
    }
    Ok(steps)
}
