//! Fully connected recurrent policy network with one hidden layer.
//!
//! Both the hidden and the output layer have all-to-all recurrent
//! connections inside the layer, fed from the previous step's
//! activations. Every neuron uses `tanh`.

use thiserror::Error;

use crate::genome::{Block, Genome, Topology};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NetworkError {
    #[error("genome topology {found:?} does not match network topology {expected:?}")]
    TopologyMismatch { expected: Topology, found: Topology },
    #[error("input has {found} components, network accepts at most {max}")]
    InputTooLong { max: usize, found: usize },
    #[error("non-finite value in network input")]
    NonFiniteInput,
    #[error("network produced a non-finite output")]
    NonFiniteOutput,
}

/// Decoded weights. Matrices are row-major with one row per destination
/// neuron, matching the genome layout.
#[derive(Debug, Clone, PartialEq)]
pub struct RnnParameters {
    topology: Topology,
    pub w_in: Vec<f64>,
    pub w_hh: Vec<f64>,
    pub b_h: Vec<f64>,
    pub w_ho: Vec<f64>,
    pub w_oo: Vec<f64>,
    pub b_o: Vec<f64>,
}

impl RnnParameters {
    pub fn zeros(topology: Topology) -> Self {
        let Topology {
            input_size: i,
            hidden_size: h,
            output_size: o,
        } = topology;
        Self {
            topology,
            w_in: vec![0.0; h * i],
            w_hh: vec![0.0; h * h],
            b_h: vec![0.0; h],
            w_ho: vec![0.0; o * h],
            w_oo: vec![0.0; o * o],
            b_o: vec![0.0; o],
        }
    }

    pub fn topology(&self) -> Topology {
        self.topology
    }

    fn block(&self, block: Block) -> &[f64] {
        match block {
            Block::InputHidden => &self.w_in,
            Block::HiddenHidden => &self.w_hh,
            Block::HiddenBias => &self.b_h,
            Block::HiddenOutput => &self.w_ho,
            Block::OutputOutput => &self.w_oo,
            Block::OutputBias => &self.b_o,
        }
    }

    /// Concatenates the blocks back into genome order.
    pub fn flatten(&self) -> Vec<f64> {
        Block::ALL
            .iter()
            .flat_map(|b| self.block(*b).iter().copied())
            .collect()
    }

    /// Advances the network by one step, updating `state` in place.
    /// Inputs shorter than the input layer are zero-padded on the right.
    pub fn step_in_place<'s>(
        &self,
        state: &'s mut RnnState,
        input: &[f64],
    ) -> Result<&'s [f64], NetworkError> {
        let Topology {
            input_size: ni,
            hidden_size: nh,
            output_size: no,
        } = self.topology;
        if input.len() > ni {
            return Err(NetworkError::InputTooLong {
                max: ni,
                found: input.len(),
            });
        }
        if input.iter().any(|x| !x.is_finite()) {
            return Err(NetworkError::NonFiniteInput);
        }

        let mut hidden = [0.0f64; MAX_STACK];
        let hidden: &mut [f64] = if nh <= MAX_STACK {
            &mut hidden[..nh]
        } else {
            &mut vec![0.0; nh][..]
        };
        for (d, h) in hidden.iter_mut().enumerate() {
            let w_in = &self.w_in[d * ni..d * ni + input.len()];
            let w_hh = &self.w_hh[d * nh..(d + 1) * nh];
            let mut acc = self.b_h[d];
            acc += w_in.iter().zip(input).map(|(w, x)| w * x).sum::<f64>();
            acc += w_hh
                .iter()
                .zip(&state.hidden)
                .map(|(w, x)| w * x)
                .sum::<f64>();
            *h = acc.tanh();
        }

        let mut output = [0.0f64; MAX_STACK];
        let output: &mut [f64] = if no <= MAX_STACK {
            &mut output[..no]
        } else {
            &mut vec![0.0; no][..]
        };
        for (d, out) in output.iter_mut().enumerate() {
            let w_ho = &self.w_ho[d * nh..(d + 1) * nh];
            let w_oo = &self.w_oo[d * no..(d + 1) * no];
            let mut acc = self.b_o[d];
            acc += w_ho
                .iter()
                .zip(hidden.iter())
                .map(|(w, x)| w * x)
                .sum::<f64>();
            acc += w_oo
                .iter()
                .zip(&state.output)
                .map(|(w, x)| w * x)
                .sum::<f64>();
            *out = acc.tanh();
        }

        if output.iter().any(|x| !x.is_finite()) {
            return Err(NetworkError::NonFiniteOutput);
        }
        state.hidden.copy_from_slice(hidden);
        state.output.copy_from_slice(output);
        Ok(&state.output)
    }

    /// Pure form of [`RnnParameters::step_in_place`].
    pub fn step(
        &self,
        state: &RnnState,
        input: &[f64],
    ) -> Result<(Vec<f64>, RnnState), NetworkError> {
        let mut next = state.clone();
        let out = self.step_in_place(&mut next, input)?.to_vec();
        Ok((out, next))
    }
}

const MAX_STACK: usize = 16;

/// Previous-step activations of the hidden and output layers.
#[derive(Debug, Clone, PartialEq)]
pub struct RnnState {
    pub hidden: Vec<f64>,
    pub output: Vec<f64>,
}

impl RnnState {
    pub fn reset(topology: Topology) -> Self {
        Self {
            hidden: vec![0.0; topology.hidden_size],
            output: vec![0.0; topology.output_size],
        }
    }
}

pub fn reset_state(topology: Topology) -> RnnState {
    RnnState::reset(topology)
}

/// Maps a genome onto network weights; masked-off positions become 0.
pub fn decode(genome: &Genome, topology: Topology) -> Result<RnnParameters, NetworkError> {
    if genome.topology() != topology {
        return Err(NetworkError::TopologyMismatch {
            expected: topology,
            found: genome.topology(),
        });
    }
    let layout = topology.layout();
    let effective = genome.effective_weights();
    let mut params = RnnParameters::zeros(topology);
    for block in Block::ALL {
        let start = layout.block_offset(block);
        let src = &effective[start..start + layout.block_len(block)];
        let dst = match block {
            Block::InputHidden => &mut params.w_in,
            Block::HiddenHidden => &mut params.w_hh,
            Block::HiddenBias => &mut params.b_h,
            Block::HiddenOutput => &mut params.w_ho,
            Block::OutputOutput => &mut params.w_oo,
            Block::OutputBias => &mut params.b_o,
        };
        dst.copy_from_slice(src);
    }
    Ok(params)
}

/// Argmax over the first `n` outputs; ties go to the lowest index.
pub fn interpret_discrete(output: &[f64], n: usize) -> usize {
    let n = n.clamp(1, output.len().max(1));
    let mut best = 0;
    for (i, v) in output.iter().enumerate().take(n).skip(1) {
        if *v > output[best] {
            best = i;
        }
    }
    best
}

/// Linearly maps each kept output from (-1, 1) onto its `(min, max)`.
pub fn interpret_box(output: &[f64], bounds: &[(f64, f64)]) -> Vec<f64> {
    output
        .iter()
        .zip(bounds)
        .map(|(x, (lo, hi))| lo + (x + 1.0) / 2.0 * (hi - lo))
        .collect()
}
