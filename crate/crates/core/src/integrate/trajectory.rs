use std::io::{self, Write};

/// Stored solution nodes `(t_k, x(t_k))`, from `t = 0` to the horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    times: Vec<f64>,
    states: Vec<Vec<f64>>,
}

impl Trajectory {
    pub(crate) fn start(x0: &[f64]) -> Self {
        Self { times: vec![0.0], states: vec![x0.to_vec()] }
    }

    pub(crate) fn push(&mut self, t: f64, x: &[f64]) {
        debug_assert!(t > *self.times.last().unwrap());
        self.times.push(t);
        self.states.push(x.to_vec());
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[Vec<f64>] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_time(&self) -> f64 {
        *self.times.last().expect("a trajectory always holds its initial node")
    }

    pub fn endpoint(&self) -> &[f64] {
        self.states.last().expect("a trajectory always holds its initial node")
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, &[f64])> {
        self.times.iter().copied().zip(self.states.iter().map(Vec::as_slice))
    }

    pub(crate) fn into_endpoint(mut self) -> Vec<f64> {
        self.states.pop().expect("a trajectory always holds its initial node")
    }

    /// Writes `t,x_1,...,x_d` rows with a header line.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        let dim = self.states.first().map_or(0, Vec::len);
        write!(out, "t")?;
        for j in 1..=dim {
            write!(out, ",x_{j}")?;
        }
        writeln!(out)?;
        for (t, x) in self.iter() {
            write!(out, "{t}")?;
            for v in x {
                write!(out, ",{v}")?;
            }
            writeln!(out)?;
        }
        Ok(())
    }
}
