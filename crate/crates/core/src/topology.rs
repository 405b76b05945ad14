//! Random fixed ad hoc topologies and the transmitter-to-receiver
//! link-gain matrix every other module consumes.
//!
//! Gain convention used throughout the crate: `gains[i][j]` is the linear
//! gain from the transmitter of pair `i` to the receiver of pair `j`.

use std::io::{BufRead, Write};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{rng_for, stream};

/// A planar position in meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        (dx * dx + dy * dy).sqrt()
    }
}

/// One transmitter-receiver pair. Ids are 1-based in exports.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodePair {
    pub id: usize,
    pub tx: Point,
    pub rx: Point,
}

/// Receiver placement rule relative to its transmitter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum Placement {
    /// Receiver drawn uniformly over the whole square.
    UniformSquare,
    /// Receiver drawn uniformly from the annulus [ref_dist, radius]
    /// around its transmitter.
    Disk { radius: f64 },
}

impl Default for Placement {
    fn default() -> Self {
        Placement::Disk { radius: 50.0 }
    }
}

/// Parameters for topology generation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopologyParams {
    pub n_pairs: usize,
    pub area_side: f64,
    pub placement: Placement,
    /// Path-loss exponent.
    pub alpha: f64,
    /// Reference distance d0 in meters; also the minimum tx-rx separation.
    pub ref_dist: f64,
}

impl Default for TopologyParams {
    fn default() -> Self {
        TopologyParams {
            n_pairs: 30,
            area_side: 200.0,
            placement: Placement::default(),
            alpha: 4.0,
            ref_dist: 1.0,
        }
    }
}

impl TopologyParams {
    fn validate(&self) -> Result<()> {
        if self.n_pairs < 2 {
            return Err(Error::InvalidParameter(format!(
                "n_pairs must be >= 2, got {}",
                self.n_pairs
            )));
        }
        if !(self.area_side > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "area_side must be > 0, got {}",
                self.area_side
            )));
        }
        if !(self.alpha > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "alpha must be > 0, got {}",
                self.alpha
            )));
        }
        if !(self.ref_dist > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "ref_dist must be > 0, got {}",
                self.ref_dist
            )));
        }
        if let Placement::Disk { radius } = self.placement {
            if !(radius > self.ref_dist) {
                return Err(Error::InvalidParameter(format!(
                    "disk radius must exceed ref_dist, got {radius}"
                )));
            }
        }
        Ok(())
    }
}

/// A generated network: pair positions, link-gain matrix and powers.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    pub pairs: Vec<NodePair>,
    pub area_side: f64,
    /// gains[i][j]: transmitter of pair i -> receiver of pair j, in (0, 1].
    pub gains: Vec<Vec<f64>>,
    /// Linear transmit powers, one per pair.
    pub powers: Vec<f64>,
    pub alpha: f64,
    pub ref_dist: f64,
}

impl Network {
    /// Number of pairs.
    pub fn len(&self) -> usize {
        self.powers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.powers.is_empty()
    }

    /// Gain from the transmitter of `tx_pair` to the receiver of `rx_pair`.
    #[inline]
    pub fn gain(&self, tx_pair: usize, rx_pair: usize) -> f64 {
        self.gains[tx_pair][rx_pair]
    }

    /// Build a network directly from a gain matrix, for small hand-made
    /// instances. Positions are placeholders; signaling simulations need a
    /// generated (position-backed) network instead.
    pub fn from_gains(gains: Vec<Vec<f64>>, powers: Vec<f64>) -> Result<Network> {
        let n = gains.len();
        if n < 2 {
            return Err(Error::InvalidParameter("need at least 2 pairs".into()));
        }
        if powers.len() != n || gains.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidParameter("gain matrix must be square".into()));
        }
        for row in &gains {
            for &g in row {
                if !(g > 0.0 && g <= 1.0) || !g.is_finite() {
                    return Err(Error::InvalidParameter(format!("gain {g} outside (0, 1]")));
                }
            }
        }
        if powers.iter().any(|&p| !(p > 0.0)) {
            return Err(Error::InvalidParameter("powers must be positive".into()));
        }
        let pairs = (0..n)
            .map(|i| NodePair {
                id: i + 1,
                tx: Point::new(0.0, 0.0),
                rx: Point::new(0.0, 0.0),
            })
            .collect();
        Ok(Network {
            pairs,
            area_side: 0.0,
            gains,
            powers,
            alpha: 4.0,
            ref_dist: 1.0,
        })
    }

    /// Rebuild a network from pair positions, recomputing the gain matrix.
    pub fn from_pairs(
        pairs: Vec<NodePair>,
        area_side: f64,
        alpha: f64,
        ref_dist: f64,
    ) -> Result<Network> {
        if pairs.len() < 2 {
            return Err(Error::InvalidParameter("need at least 2 pairs".into()));
        }
        let n = pairs.len();
        let mut gains = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..n {
                gains[i][j] = link_gain(pairs[i].tx, pairs[j].rx, alpha, ref_dist);
            }
        }
        Ok(Network {
            pairs,
            area_side,
            gains,
            powers: vec![1.0; n],
            alpha,
            ref_dist,
        })
    }

    /// `id,tx_x,tx_y,rx_x,rx_y` rows, full float precision for lossless import.
    pub fn write_topology_csv<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        writeln!(w, "id,tx_x,tx_y,rx_x,rx_y")?;
        for p in &self.pairs {
            writeln!(w, "{},{},{},{},{}", p.id, p.tx.x, p.tx.y, p.rx.x, p.rx.y)?;
        }
        Ok(())
    }

    /// N rows of N comma-separated linear gains.
    pub fn write_gains_csv<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        for row in &self.gains {
            let line: Vec<String> = row.iter().map(|g| g.to_string()).collect();
            writeln!(w, "{}", line.join(","))?;
        }
        Ok(())
    }

    /// Parse a topology CSV (as written by `write_topology_csv`) and rebuild
    /// the gain matrix with the given propagation parameters.
    pub fn read_topology_csv<R: BufRead>(
        r: R,
        area_side: f64,
        alpha: f64,
        ref_dist: f64,
    ) -> Result<Network> {
        let mut pairs = Vec::new();
        for (lineno, line) in r.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with("id,") {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 5 {
                return Err(Error::Parse(format!(
                    "line {}: expected 5 fields, got {}",
                    lineno + 1,
                    fields.len()
                )));
            }
            let parse = |s: &str| -> Result<f64> {
                s.parse::<f64>()
                    .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))
            };
            let id: usize = fields[0]
                .parse()
                .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))?;
            pairs.push(NodePair {
                id,
                tx: Point::new(parse(fields[1])?, parse(fields[2])?),
                rx: Point::new(parse(fields[3])?, parse(fields[4])?),
            });
        }
        Network::from_pairs(pairs, area_side, alpha, ref_dist)
    }
}

/// Power-law path loss with a near-field clamp:
/// `min(1, (d / ref_dist)^-alpha)` with `d = max(distance, ref_dist)`.
pub fn link_gain(tx: Point, rx: Point, alpha: f64, ref_dist: f64) -> f64 {
    let d = tx.distance(&rx).max(ref_dist);
    ((d / ref_dist).powf(-alpha)).min(1.0)
}

/// Generate a random topology. Deterministic for a fixed (seed, params).
pub fn generate_network(seed: u64, params: &TopologyParams) -> Result<Network> {
    params.validate()?;
    let mut rng = rng_for(seed, stream::TOPOLOGY);
    let side = params.area_side;
    let mut pairs = Vec::with_capacity(params.n_pairs);
    for id in 1..=params.n_pairs {
        let tx = Point::new(rng.gen::<f64>() * side, rng.gen::<f64>() * side);
        let rx = loop {
            let cand = match params.placement {
                Placement::UniformSquare => {
                    Point::new(rng.gen::<f64>() * side, rng.gen::<f64>() * side)
                }
                Placement::Disk { radius } => {
                    let d0 = params.ref_dist;
                    // Uniform over the annulus area.
                    let r = (d0 * d0 + rng.gen::<f64>() * (radius * radius - d0 * d0)).sqrt();
                    let theta = rng.gen::<f64>() * std::f64::consts::TAU;
                    Point::new(tx.x + r * theta.cos(), tx.y + r * theta.sin())
                }
            };
            let inside = cand.x >= 0.0 && cand.x <= side && cand.y >= 0.0 && cand.y <= side;
            if inside && tx.distance(&cand) >= params.ref_dist {
                break cand;
            }
        };
        pairs.push(NodePair { id, tx, rx });
    }
    Network::from_pairs(pairs, side, params.alpha, params.ref_dist)
}
