//! Control-channel etiquette: the three-way call-setup handshake, two-way
//! teardown, probing-based gain estimation at elevated signaling power, and
//! Channel Status Table maintenance at every transmitter and receiver.
//!
//! Table updates are driven exclusively by packet application, so replaying
//! a packet log against a fresh world reproduces every table exactly.

use std::collections::BTreeMap;

use rand::Rng;

use crate::error::{Error, Result};
use crate::game::{Channel, StrategyProfile};
use crate::rng::splitmix64;
use crate::topology::{link_gain, Network, Point};

/// Control-packet types, in handshake order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PacketKind {
    Start,
    StartCh,
    AckStartCh,
    End,
    AckEnd,
}

impl PacketKind {
    pub fn label(&self) -> &'static str {
        match self {
            PacketKind::Start => "START",
            PacketKind::StartCh => "START_CH",
            PacketKind::AckStartCh => "ACK_START_CH",
            PacketKind::End => "END",
            PacketKind::AckEnd => "ACK_END",
        }
    }
}

/// One control-channel packet. START carries the sender's outgoing
/// interference estimates; START_CH and ACK_START_CH carry the selected
/// channel.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalingPacket {
    pub kind: PacketKind,
    /// 0-based pair index of the sender.
    pub sender_pair: usize,
    pub channel: Option<Channel>,
    pub outgoing_estimates: Option<Vec<f64>>,
}

/// A packet with its position in the total event order.
#[derive(Debug, Clone, PartialEq)]
pub struct LoggedPacket {
    pub slot: u64,
    pub seq: u64,
    pub packet: SignalingPacket,
}

/// Which node of a pair holds the table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CstSide {
    Transmitter,
    Receiver,
}

/// A neighbor's announced channel and the link gain estimated from its
/// overheard signaling packets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CstEntry {
    pub channel: Channel,
    pub est_gain: f64,
}

/// Per-node map from neighbor pair id to its status entry.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelStatusTable {
    pub side: CstSide,
    entries: BTreeMap<usize, CstEntry>,
}

impl ChannelStatusTable {
    fn new(side: CstSide) -> Self {
        ChannelStatusTable {
            side,
            entries: BTreeMap::new(),
        }
    }

    pub fn entries(&self) -> &BTreeMap<usize, CstEntry> {
        &self.entries
    }

    pub fn get(&self, pair: usize) -> Option<&CstEntry> {
        self.entries.get(&pair)
    }
}

/// Signaling-power and hearing parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbePowerConfig {
    /// Signaling-to-data transmit power ratio.
    pub ratio: f64,
    /// Minimum received power to decode a control packet; 0 hears all.
    pub hear_threshold: f64,
    /// Multiplicative estimation-noise amplitude; 0 disables noise.
    pub noise_amplitude: f64,
    /// Seed for the stateless per-event noise factors.
    pub noise_seed: u64,
}

impl Default for ProbePowerConfig {
    fn default() -> Self {
        ProbePowerConfig {
            ratio: 2.0,
            hear_threshold: 0.0,
            noise_amplitude: 0.0,
            noise_seed: 0,
        }
    }
}

impl ProbePowerConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.ratio >= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "signaling power ratio must be >= 1, got {}",
                self.ratio
            )));
        }
        if !(self.hear_threshold >= 0.0) {
            return Err(Error::InvalidParameter(
                "hear_threshold must be >= 0".into(),
            ));
        }
        Ok(())
    }
}

/// Estimate the link gain from an overheard probing packet: the received
/// power divided by the known signaling power. Returns `None` when the
/// packet lands below the hearing threshold.
pub fn observe_probe(
    listener_pos: Point,
    sender_pos: Point,
    sender_power: f64,
    probe: &ProbePowerConfig,
    net: &Network,
) -> Option<f64> {
    let gain = link_gain(sender_pos, listener_pos, net.alpha, net.ref_dist);
    let received = probe.ratio * sender_power * gain;
    if received < probe.hear_threshold {
        None
    } else {
        Some(received / (probe.ratio * sender_power))
    }
}

fn noise_factor(probe: &ProbePowerConfig, seq: u64, listener: usize) -> f64 {
    if probe.noise_amplitude == 0.0 {
        return 1.0;
    }
    let h = splitmix64(probe.noise_seed ^ seq.wrapping_mul(0x9e37_79b9) ^ (listener as u64) << 32);
    let unit = (h >> 11) as f64 / (1u64 << 53) as f64;
    1.0 + probe.noise_amplitude * (2.0 * unit - 1.0)
}

/// The discrete-event signaling world: one CST_t per transmitter, one
/// CST_r per receiver, the set of active calls, and the packet log.
#[derive(Debug, Clone)]
pub struct SignalingWorld<'a> {
    net: &'a Network,
    n_channels: u32,
    probe: ProbePowerConfig,
    cst_t: Vec<ChannelStatusTable>,
    cst_r: Vec<ChannelStatusTable>,
    active: Vec<Option<Channel>>,
    log: Vec<LoggedPacket>,
    seq: u64,
    slot: u64,
}

impl<'a> SignalingWorld<'a> {
    pub fn new(net: &'a Network, n_channels: u32, probe: ProbePowerConfig) -> Result<Self> {
        probe.validate()?;
        if n_channels < 1 {
            return Err(Error::InvalidParameter("need at least one channel".into()));
        }
        let n = net.len();
        Ok(SignalingWorld {
            net,
            n_channels,
            probe,
            cst_t: (0..n)
                .map(|_| ChannelStatusTable::new(CstSide::Transmitter))
                .collect(),
            cst_r: (0..n)
                .map(|_| ChannelStatusTable::new(CstSide::Receiver))
                .collect(),
            active: vec![None; n],
            log: Vec::new(),
            seq: 0,
            slot: 0,
        })
    }

    pub fn transmitter_cst(&self, pair: usize) -> &ChannelStatusTable {
        &self.cst_t[pair]
    }

    pub fn receiver_cst(&self, pair: usize) -> &ChannelStatusTable {
        &self.cst_r[pair]
    }

    pub fn active_channel(&self, pair: usize) -> Option<Channel> {
        self.active[pair]
    }

    pub fn log(&self) -> &[LoggedPacket] {
        &self.log
    }

    /// Advance the slot counter used to stamp logged packets.
    pub fn advance_slot(&mut self) {
        self.slot += 1;
    }

    /// The strategy profile implied by the active calls, if every pair is
    /// currently active.
    pub fn profile(&self) -> Option<StrategyProfile> {
        if self.active.iter().any(|c| c.is_none()) {
            return None;
        }
        let channels: Vec<Channel> = self.active.iter().map(|c| c.unwrap()).collect();
        StrategyProfile::new(channels, self.n_channels).ok()
    }

    /// Interference arriving at this pair's receiver per channel, from its
    /// CST_r: `I_d(k) = sum of p_j * est_gain over entries on channel k`.
    pub fn estimate_incoming(&self, pair: usize) -> Vec<f64> {
        let mut incoming = vec![0.0; self.n_channels as usize];
        for (&neighbor, entry) in self.cst_r[pair].entries() {
            incoming[(entry.channel - 1) as usize] += self.net.powers[neighbor] * entry.est_gain;
        }
        incoming
    }

    /// Interference this pair's transmitter would create per channel, from
    /// its CST_t: `I_o(k) = sum of p_self * est_gain over entries on k`.
    pub fn estimate_outgoing(&self, pair: usize) -> Vec<f64> {
        let mut outgoing = vec![0.0; self.n_channels as usize];
        for entry in self.cst_t[pair].entries().values() {
            outgoing[(entry.channel - 1) as usize] += self.net.powers[pair] * entry.est_gain;
        }
        outgoing
    }

    fn emit(&mut self, packet: SignalingPacket) {
        Self::apply_packet(
            self.net,
            &self.probe,
            &mut self.cst_t,
            &mut self.cst_r,
            &mut self.active,
            &packet,
            self.seq,
        );
        self.log.push(LoggedPacket {
            slot: self.slot,
            seq: self.seq,
            packet,
        });
        self.seq += 1;
    }

    /// Apply one packet to the tables. Transmitters send START,
    /// ACK_START_CH and END; receivers send START_CH and ACK_END. A node
    /// only updates its table from packets sent by the opposite node kind,
    /// which is exactly the gain it needs for its side of the utility.
    fn apply_packet(
        net: &Network,
        probe: &ProbePowerConfig,
        cst_t: &mut [ChannelStatusTable],
        cst_r: &mut [ChannelStatusTable],
        active: &mut [Option<Channel>],
        packet: &SignalingPacket,
        seq: u64,
    ) {
        let p = packet.sender_pair;
        match packet.kind {
            // Probing payload is consumed by the handshake itself; the
            // channel is not yet decided, so tables are untouched.
            PacketKind::Start => {}
            // Receiver of pair p announces the choice; other transmitters
            // learn the gain toward p's receiver.
            PacketKind::StartCh => {
                let channel = packet.channel.expect("START_CH carries a channel");
                let sender_pos = net.pairs[p].rx;
                for j in 0..net.len() {
                    if j == p {
                        continue;
                    }
                    if let Some(gain) =
                        observe_probe(net.pairs[j].tx, sender_pos, net.powers[p], probe, net)
                    {
                        let est_gain = gain * noise_factor(probe, seq, j);
                        cst_t[j].entries.insert(p, CstEntry { channel, est_gain });
                    }
                }
            }
            // Transmitter of pair p acknowledges; other receivers learn the
            // gain arriving from p's transmitter.
            PacketKind::AckStartCh => {
                let channel = packet.channel.expect("ACK_START_CH carries a channel");
                let sender_pos = net.pairs[p].tx;
                for j in 0..net.len() {
                    if j == p {
                        continue;
                    }
                    if let Some(gain) =
                        observe_probe(net.pairs[j].rx, sender_pos, net.powers[p], probe, net)
                    {
                        let est_gain = gain * noise_factor(probe, seq, j);
                        cst_r[j].entries.insert(p, CstEntry { channel, est_gain });
                    }
                }
                active[p] = Some(channel);
            }
            PacketKind::End => {
                let sender_pos = net.pairs[p].tx;
                for j in 0..net.len() {
                    if j == p {
                        continue;
                    }
                    if observe_probe(net.pairs[j].rx, sender_pos, net.powers[p], probe, net)
                        .is_some()
                    {
                        cst_r[j].entries.remove(&p);
                    }
                }
            }
            PacketKind::AckEnd => {
                let sender_pos = net.pairs[p].rx;
                for j in 0..net.len() {
                    if j == p {
                        continue;
                    }
                    if observe_probe(net.pairs[j].tx, sender_pos, net.powers[p], probe, net)
                        .is_some()
                    {
                        cst_t[j].entries.remove(&p);
                    }
                }
                active[p] = None;
            }
        }
    }

    /// Run the call-setup handshake for one pair: START with outgoing
    /// estimates, channel selection at the receiver (least estimated total
    /// interference, random tie-break), START_CH, then ACK_START_CH heard
    /// by everyone in range.
    pub fn handshake<R: Rng>(&mut self, pair: usize, rng: &mut R) -> Result<Channel> {
        if pair >= self.net.len() {
            return Err(Error::InvalidParameter(format!("no pair {pair}")));
        }
        let outgoing = self.estimate_outgoing(pair);
        self.emit(SignalingPacket {
            kind: PacketKind::Start,
            sender_pair: pair,
            channel: None,
            outgoing_estimates: Some(outgoing.clone()),
        });
        let incoming = self.estimate_incoming(pair);
        // Highest cooperative utility = least estimated total interference.
        let mut best = f64::NEG_INFINITY;
        let mut ties: Vec<Channel> = Vec::new();
        for k in 0..self.n_channels as usize {
            let u2 = -(incoming[k] + outgoing[k]);
            if u2 > best {
                best = u2;
                ties.clear();
                ties.push((k + 1) as Channel);
            } else if u2 == best {
                ties.push((k + 1) as Channel);
            }
        }
        let selected = if ties.len() == 1 {
            ties[0]
        } else {
            ties[rng.gen_range(0..ties.len())]
        };
        self.emit(SignalingPacket {
            kind: PacketKind::StartCh,
            sender_pair: pair,
            channel: Some(selected),
            outgoing_estimates: None,
        });
        self.emit(SignalingPacket {
            kind: PacketKind::AckStartCh,
            sender_pair: pair,
            channel: Some(selected),
            outgoing_estimates: None,
        });
        Ok(selected)
    }

    /// Two-way teardown: END then ACK_END; hearing nodes drop the pair.
    pub fn end_call(&mut self, pair: usize) -> Result<()> {
        if pair >= self.net.len() {
            return Err(Error::InvalidParameter(format!("no pair {pair}")));
        }
        if self.active[pair].is_none() {
            return Err(Error::InvalidState(format!(
                "pair {pair} has no active call to end"
            )));
        }
        self.emit(SignalingPacket {
            kind: PacketKind::End,
            sender_pair: pair,
            channel: None,
            outgoing_estimates: None,
        });
        self.emit(SignalingPacket {
            kind: PacketKind::AckEnd,
            sender_pair: pair,
            channel: None,
            outgoing_estimates: None,
        });
        Ok(())
    }

    /// Rebuild tables and active calls from a packet log alone.
    pub fn replay(
        net: &'a Network,
        n_channels: u32,
        probe: ProbePowerConfig,
        log: &[LoggedPacket],
    ) -> Result<Self> {
        let mut world = SignalingWorld::new(net, n_channels, probe)?;
        for entry in log {
            Self::apply_packet(
                net,
                &world.probe,
                &mut world.cst_t,
                &mut world.cst_r,
                &mut world.active,
                &entry.packet,
                entry.seq,
            );
            world.log.push(entry.clone());
            world.seq = entry.seq + 1;
            world.slot = entry.slot;
        }
        Ok(world)
    }

    /// Packet log as CSV: `slot,seq,kind,sender_pair,channel,payload_summary`.
    pub fn write_log_csv<W: std::io::Write>(&self, w: &mut W) -> std::io::Result<()> {
        writeln!(w, "slot,seq,kind,sender_pair,channel,payload_summary")?;
        for entry in &self.log {
            let channel = entry
                .packet
                .channel
                .map(|c| c.to_string())
                .unwrap_or_default();
            let payload = match &entry.packet.outgoing_estimates {
                Some(v) => format!("I_o[{}]", v.len()),
                None => String::new(),
            };
            writeln!(
                w,
                "{},{},{},{},{},{}",
                entry.slot,
                entry.seq,
                entry.packet.kind.label(),
                entry.packet.sender_pair + 1,
                channel,
                payload
            )?;
        }
        Ok(())
    }
}
