use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::wen::TorusLattice;

use super::adiabatic_rate;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScheduleKind {
    Linear,
    LocalAdiabatic,
    Explicit,
}

impl std::str::FromStr for ScheduleKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear" => Ok(ScheduleKind::Linear),
            "local-adiabatic" | "locally-adiabatic" => Ok(ScheduleKind::LocalAdiabatic),
            "explicit" => Ok(ScheduleKind::Explicit),
            other => Err(Error::InvalidSchedule(format!("unknown schedule kind {other:?}"))),
        }
    }
}

impl std::fmt::Display for ScheduleKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ScheduleKind::Linear => "linear",
            ScheduleKind::LocalAdiabatic => "local-adiabatic",
            ScheduleKind::Explicit => "explicit",
        })
    }
}

/// Interpolation points `s_0 = 0, …, s_M = 1` with step duration `T/M`.
///
/// The sweep applies one propagator per point, so there are `M + 1`
/// factors; the first acts at `s = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    kind: ScheduleKind,
    total_time: f64,
    s_values: Vec<f64>,
}

/// Grid used to tabulate the local adiabatic rate.
const RATE_GRID: usize = 4001;

fn check_time(total_time: f64) -> Result<()> {
    if !(total_time.is_finite() && total_time > 0.0) {
        return Err(Error::InvalidSchedule(format!(
            "total time must be positive, got {total_time}"
        )));
    }
    Ok(())
}

fn check_steps(steps: usize) -> Result<()> {
    if steps == 0 {
        return Err(Error::InvalidSchedule("need at least one step".into()));
    }
    Ok(())
}

impl Schedule {
    /// `s_l = l / M`.
    pub fn linear(steps: usize, total_time: f64) -> Result<Self> {
        check_steps(steps)?;
        check_time(total_time)?;
        let s_values = (0..=steps).map(|l| l as f64 / steps as f64).collect();
        Ok(Schedule {
            kind: ScheduleKind::Linear,
            total_time,
            s_values,
        })
    }

    /// Spends time in proportion to the local adiabatic rate, so that
    /// `ε(s)` is constant along a continuous sweep of length `T`; the
    /// continuous `s(t)` is then sampled at `t_l = l T / M`.
    pub fn locally_adiabatic(lat: &TorusLattice, steps: usize, total_time: f64) -> Result<Self> {
        check_steps(steps)?;
        check_time(total_time)?;
        let grid: Vec<f64> = (0..RATE_GRID).map(|k| k as f64 / (RATE_GRID - 1) as f64).collect();
        let rates = grid
            .iter()
            .map(|&s| adiabatic_rate(lat, s).map(|r| if r.is_finite() { r } else { 0.0 }))
            .collect::<Result<Vec<f64>>>()?;
        let mut elapsed = vec![0.0; RATE_GRID];
        for k in 1..RATE_GRID {
            elapsed[k] = elapsed[k - 1] + 0.5 * (rates[k] + rates[k - 1]) * (grid[k] - grid[k - 1]);
        }
        let total = elapsed[RATE_GRID - 1];
        if total <= 0.0 {
            return Err(Error::InvalidSchedule("adiabatic rate vanishes everywhere".into()));
        }
        let s_values = (0..=steps)
            .map(|l| interp(l as f64 / steps as f64 * total, &elapsed, &grid))
            .collect();
        Ok(Schedule {
            kind: ScheduleKind::LocalAdiabatic,
            total_time,
            s_values,
        })
    }

    /// A user-supplied list; must start at 0, end at 1 and never decrease.
    pub fn explicit(s_values: Vec<f64>, total_time: f64) -> Result<Self> {
        check_time(total_time)?;
        if s_values.len() < 2 {
            return Err(Error::InvalidSchedule("need at least two points".into()));
        }
        if s_values[0] != 0.0 || *s_values.last().unwrap() != 1.0 {
            return Err(Error::InvalidSchedule("schedule must start at 0 and end at 1".into()));
        }
        if s_values.windows(2).any(|w| !(w[1] >= w[0])) {
            return Err(Error::InvalidSchedule("schedule must be non-decreasing".into()));
        }
        Ok(Schedule {
            kind: ScheduleKind::Explicit,
            total_time,
            s_values,
        })
    }

    pub fn build(kind: ScheduleKind, lat: &TorusLattice, steps: usize, total_time: f64) -> Result<Self> {
        match kind {
            ScheduleKind::Linear => Self::linear(steps, total_time),
            ScheduleKind::LocalAdiabatic => Self::locally_adiabatic(lat, steps, total_time),
            ScheduleKind::Explicit => Err(Error::InvalidSchedule(
                "explicit schedules need their s values".into(),
            )),
        }
    }

    pub fn kind(&self) -> ScheduleKind {
        self.kind
    }

    pub fn steps(&self) -> usize {
        self.s_values.len() - 1
    }

    pub fn total_time(&self) -> f64 {
        self.total_time
    }

    pub fn tau(&self) -> f64 {
        self.total_time / self.steps() as f64
    }

    pub fn s_values(&self) -> &[f64] {
        &self.s_values
    }

    /// Finite-difference `ds/dt` around point `l`.
    pub fn ds_dt(&self, l: usize) -> f64 {
        let (a, b) = if l == 0 { (0, 1) } else { (l - 1, l) };
        (self.s_values[b] - self.s_values[a]) / self.tau()
    }
}

/// Piecewise-linear inverse lookup: `y(x)` for increasing `xs`.
fn interp(x: f64, xs: &[f64], ys: &[f64]) -> f64 {
    if x <= xs[0] {
        return ys[0];
    }
    let last = xs.len() - 1;
    if x >= xs[last] {
        return ys[last];
    }
    let k = xs.partition_point(|&v| v <= x);
    let (x0, x1) = (xs[k - 1], xs[k]);
    if x1 == x0 {
        return ys[k];
    }
    ys[k - 1] + (ys[k] - ys[k - 1]) * (x - x0) / (x1 - x0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wen::build_lattice;

    #[test]
    fn linear_points() {
        let s = Schedule::linear(7, 2.9982).unwrap();
        assert_eq!(s.steps(), 7);
        assert_eq!(s.s_values().len(), 8);
        assert_eq!(s.s_values()[0], 0.0);
        assert_eq!(s.s_values()[7], 1.0);
        assert!((s.tau() - 2.9982 / 7.0).abs() < 1e-15);
        assert!((s.ds_dt(3) - 1.0 / 2.9982).abs() < 1e-12);
    }

    #[test]
    fn explicit_validation() {
        assert!(Schedule::explicit(vec![0.0, 0.5, 1.0], 1.0).is_ok());
        assert!(Schedule::explicit(vec![0.0, 0.6, 0.5, 1.0], 1.0).is_err());
        assert!(Schedule::explicit(vec![0.1, 1.0], 1.0).is_err());
        assert!(Schedule::explicit(vec![0.0, 0.9], 1.0).is_err());
        assert!(Schedule::explicit(vec![0.0, 1.0], 0.0).is_err());
        assert!(Schedule::linear(0, 1.0).is_err());
    }

    #[test]
    fn local_schedule_is_monotone() {
        let lat = build_lattice(2).unwrap();
        let s = Schedule::locally_adiabatic(&lat, 7, 2.9982).unwrap();
        let v = s.s_values();
        assert_eq!(v.len(), 8);
        assert_eq!(v[0], 0.0);
        assert!((v[7] - 1.0).abs() < 1e-12);
        assert!(v.windows(2).all(|w| w[1] >= w[0]));
        assert!(v != Schedule::linear(7, 2.9982).unwrap().s_values());
    }

    #[test]
    fn kind_parses() {
        assert_eq!("linear".parse::<ScheduleKind>().unwrap(), ScheduleKind::Linear);
        assert_eq!(
            "local-adiabatic".parse::<ScheduleKind>().unwrap(),
            ScheduleKind::LocalAdiabatic
        );
        assert!("cubic".parse::<ScheduleKind>().is_err());
    }

    #[test]
    fn interp_inverts() {
        let xs = [0.0, 1.0, 3.0];
        let ys = [0.0, 0.5, 1.0];
        assert_eq!(interp(2.0, &xs, &ys), 0.75);
        assert_eq!(interp(-1.0, &xs, &ys), 0.0);
        assert_eq!(interp(5.0, &xs, &ys), 1.0);
    }
}
