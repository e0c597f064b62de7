//! Fixed-layout genome: a flat vector of network parameters plus a
//! connection mask. Nodes are never added or removed, only connections.

use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use rand::Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GenomeError {
    #[error("parse error in field `{field}`: {message}")]
    Parse {
        field: &'static str,
        message: String,
    },
    #[error("structural error: {0}")]
    Structural(String),
}

/// Layer sizes of the single-hidden-layer recurrent network.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Topology {
    pub input_size: usize,
    pub hidden_size: usize,
    pub output_size: usize,
}

impl Topology {
    pub fn new(
        input_size: usize,
        hidden_size: usize,
        output_size: usize,
    ) -> Result<Self, GenomeError> {
        if input_size == 0 || hidden_size == 0 || output_size == 0 {
            return Err(GenomeError::Structural(format!(
                "layer sizes must be positive, got {input_size} {hidden_size} {output_size}"
            )));
        }
        Ok(Self {
            input_size,
            hidden_size,
            output_size,
        })
    }

    /// Six inputs, six hidden neurons, three outputs: enough to drive
    /// every task in the suite.
    pub const fn standard() -> Self {
        Self {
            input_size: 6,
            hidden_size: 6,
            output_size: 3,
        }
    }

    pub fn parameter_count(&self) -> usize {
        let (i, h, o) = (self.input_size, self.hidden_size, self.output_size);
        i * h + h * h + h + h * o + o * o + o
    }

    pub fn layout(&self) -> ParameterLayout {
        ParameterLayout::new(*self)
    }
}

impl Default for Topology {
    fn default() -> Self {
        Self::standard()
    }
}

/// Parameter blocks in their canonical order inside the flat genome.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Block {
    InputHidden,
    HiddenHidden,
    HiddenBias,
    HiddenOutput,
    OutputOutput,
    OutputBias,
}

impl Block {
    pub const ALL: [Block; 6] = [
        Block::InputHidden,
        Block::HiddenHidden,
        Block::HiddenBias,
        Block::HiddenOutput,
        Block::OutputOutput,
        Block::OutputBias,
    ];
}

/// Position of one parameter: `row` is the destination neuron, `col` the
/// source neuron (always 0 for bias blocks).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Coord {
    pub block: Block,
    pub row: usize,
    pub col: usize,
}

/// Bijection between flat genome indices and block coordinates. Matrix
/// blocks are stored row-major by destination neuron.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParameterLayout {
    topology: Topology,
}

impl ParameterLayout {
    pub fn new(topology: Topology) -> Self {
        Self { topology }
    }

    /// (rows, cols) of a block.
    pub fn shape(&self, block: Block) -> (usize, usize) {
        let Topology {
            input_size: i,
            hidden_size: h,
            output_size: o,
        } = self.topology;
        match block {
            Block::InputHidden => (h, i),
            Block::HiddenHidden => (h, h),
            Block::HiddenBias => (h, 1),
            Block::HiddenOutput => (o, h),
            Block::OutputOutput => (o, o),
            Block::OutputBias => (o, 1),
        }
    }

    pub fn block_len(&self, block: Block) -> usize {
        let (r, c) = self.shape(block);
        r * c
    }

    pub fn block_offset(&self, block: Block) -> usize {
        Block::ALL
            .iter()
            .take_while(|b| **b != block)
            .map(|b| self.block_len(*b))
            .sum()
    }

    pub fn index_of(&self, coord: Coord) -> Option<usize> {
        let (rows, cols) = self.shape(coord.block);
        if coord.row >= rows || coord.col >= cols {
            return None;
        }
        Some(self.block_offset(coord.block) + coord.row * cols + coord.col)
    }

    pub fn coord_of(&self, index: usize) -> Option<Coord> {
        let mut offset = 0;
        for block in Block::ALL {
            let len = self.block_len(block);
            if index < offset + len {
                let (_, cols) = self.shape(block);
                let local = index - offset;
                return Some(Coord {
                    block,
                    row: local / cols,
                    col: local % cols,
                });
            }
            offset += len;
        }
        None
    }
}

/// Flat weights plus connection mask. A masked-off position keeps its
/// stored weight but decodes to zero.
#[derive(Debug, Clone, PartialEq)]
pub struct Genome {
    topology: Topology,
    weights: Vec<f64>,
    mask: Vec<bool>,
}

impl Genome {
    pub fn new(
        topology: Topology,
        weights: Vec<f64>,
        mask: Vec<bool>,
    ) -> Result<Self, GenomeError> {
        let n = topology.parameter_count();
        if weights.len() != mask.len() {
            return Err(GenomeError::Structural(format!(
                "mask length {} does not match weight length {}",
                mask.len(),
                weights.len()
            )));
        }
        if weights.len() != n {
            return Err(GenomeError::Structural(format!(
                "expected {n} parameters for topology, found {}",
                weights.len()
            )));
        }
        Ok(Self {
            topology,
            weights,
            mask,
        })
    }

    /// Genome with every connection disabled and all weights zero.
    pub fn empty(topology: Topology) -> Self {
        let n = topology.parameter_count();
        Self {
            topology,
            weights: vec![0.0; n],
            mask: vec![false; n],
        }
    }

    /// Draws a sparse genome: `round(init_fraction * n)` positions are
    /// enabled, chosen without replacement, with standard-normal weights.
    pub fn random<R: Rng + ?Sized>(topology: Topology, init_fraction: f64, rng: &mut R) -> Self {
        let n = topology.parameter_count();
        let fraction = init_fraction.clamp(0.0, 1.0);
        let active = ((fraction * n as f64).round() as usize).min(n);
        let mut genome = Self::empty(topology);
        for i in index::sample(rng, n, active).into_iter() {
            genome.mask[i] = true;
            genome.weights[i] = rng.sample(StandardNormal);
        }
        genome
    }

    pub fn topology(&self) -> Topology {
        self.topology
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn is_active(&self, index: usize) -> bool {
        self.mask[index]
    }

    pub fn connection_count(&self) -> usize {
        self.mask.iter().filter(|m| **m).count()
    }

    /// `weights ⊙ mask`: what the network actually sees.
    pub fn effective_weights(&self) -> Vec<f64> {
        self.weights
            .iter()
            .zip(&self.mask)
            .map(|(w, m)| if *m { *w } else { 0.0 })
            .collect()
    }

    pub(crate) fn weights_mut(&mut self) -> &mut [f64] {
        &mut self.weights
    }

    pub(crate) fn mask_mut(&mut self) -> &mut [bool] {
        &mut self.mask
    }

    pub(crate) fn parts_mut(&mut self) -> (&mut [f64], &mut [bool]) {
        (&mut self.weights, &mut self.mask)
    }
}

/// Free-function form of [`Genome::random`].
pub fn random_genome<R: Rng + ?Sized>(
    topology: Topology,
    init_fraction: f64,
    rng: &mut R,
) -> Genome {
    Genome::random(topology, init_fraction, rng)
}

pub fn connection_count(genome: &Genome) -> usize {
    genome.connection_count()
}

impl fmt::Display for Genome {
    /// Three lines: `topology I H O`, the weights, the `0|1` mask.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let t = self.topology;
        writeln!(
            f,
            "topology {} {} {}",
            t.input_size, t.hidden_size, t.output_size
        )?;
        let weights: Vec<String> = self.weights.iter().map(|w| format!("{w:?}")).collect();
        writeln!(f, "{}", weights.join(" "))?;
        let mask: Vec<&str> = self
            .mask
            .iter()
            .map(|m| if *m { "1" } else { "0" })
            .collect();
        writeln!(f, "{}", mask.join(" "))
    }
}

impl FromStr for Genome {
    type Err = GenomeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut lines = s.lines().map(str::trim).filter(|l| !l.is_empty());

        let header = lines.next().ok_or(GenomeError::Parse {
            field: "topology",
            message: "missing header line".into(),
        })?;
        let mut parts = header.split_whitespace();
        if parts.next() != Some("topology") {
            return Err(GenomeError::Parse {
                field: "topology",
                message: format!("expected `topology I H O`, found `{header}`"),
            });
        }
        let sizes: Vec<usize> = parts
            .map(|p| p.parse::<usize>())
            .collect::<Result<_, _>>()
            .map_err(|e| GenomeError::Parse {
                field: "topology",
                message: e.to_string(),
            })?;
        if sizes.len() != 3 {
            return Err(GenomeError::Parse {
                field: "topology",
                message: format!("expected 3 layer sizes, found {}", sizes.len()),
            });
        }
        let topology = Topology::new(sizes[0], sizes[1], sizes[2])?;

        let weights_line = lines.next().ok_or(GenomeError::Parse {
            field: "weights",
            message: "missing weights line".into(),
        })?;
        let weights: Vec<f64> = weights_line
            .split_whitespace()
            .map(|w| w.parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| GenomeError::Parse {
                field: "weights",
                message: e.to_string(),
            })?;

        let mask_line = lines.next().ok_or(GenomeError::Parse {
            field: "mask",
            message: "missing mask line".into(),
        })?;
        let mask: Vec<bool> = mask_line
            .split_whitespace()
            .map(|m| match m {
                "0" => Ok(false),
                "1" => Ok(true),
                other => Err(GenomeError::Parse {
                    field: "mask",
                    message: format!("expected 0 or 1, found `{other}`"),
                }),
            })
            .collect::<Result<_, _>>()?;

        if let Some(extra) = lines.next() {
            return Err(GenomeError::Parse {
                field: "trailer",
                message: format!("unexpected trailing line `{extra}`"),
            });
        }
        Genome::new(topology, weights, mask)
    }
}
