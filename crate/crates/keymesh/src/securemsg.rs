//! Hop-by-hop encrypted delivery over an in-memory simulated network.
//!
//! A message follows the greedy route; at every hop it is sealed under the
//! pairwise key of that edge, placed in the receiving node's inbox, and
//! opened there before being re-sealed towards the next hop. Intermediaries
//! therefore see the plaintext — they are trusted forwarders — while nodes
//! off the path hold none of the hop keys and can read nothing.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use chacha20poly1305::aead::{Aead, KeyInit};
use chacha20poly1305::{ChaCha20Poly1305, Key, Nonce};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::keygraph::{check_node, KeyGraph, KeyId, NodeId};
use crate::router::{self, PathTrace};

/// Pluggable authenticated symmetric cipher.
///
/// `open` must reject any ciphertext sealed under a different key or nonce,
/// and must never return garbage. Nonces are allocated by the network as a
/// per-key monotone counter, so they cannot repeat within a run.
pub trait CipherSuite: Send + Sync {
    fn name(&self) -> &'static str;
    fn seal(&self, key: &[u8; 32], nonce: u64, plaintext: &[u8]) -> Vec<u8>;
    fn open(&self, key: &[u8; 32], nonce: u64, ciphertext: &[u8]) -> Option<Vec<u8>>;
}

/// Default suite: ChaCha20-Poly1305 with the counter embedded in the nonce.
#[derive(Debug, Default, Clone, Copy)]
pub struct ChaChaPolySuite;

fn aead_nonce(counter: u64) -> Nonce {
    let mut bytes = [0u8; 12];
    bytes[4..].copy_from_slice(&counter.to_be_bytes());
    Nonce::from(bytes)
}

impl CipherSuite for ChaChaPolySuite {
    fn name(&self) -> &'static str {
        "chacha20poly1305"
    }

    fn seal(&self, key: &[u8; 32], nonce: u64, plaintext: &[u8]) -> Vec<u8> {
        let cipher = ChaCha20Poly1305::new(Key::from_slice(key));
        cipher
            .encrypt(&aead_nonce(nonce), plaintext)
            .expect("in-memory encryption cannot fail")
    }

    fn open(&self, key: &[u8; 32], nonce: u64, ciphertext: &[u8]) -> Option<Vec<u8>> {
        let cipher = ChaCha20Poly1305::new(Key::from_slice(key));
        cipher.decrypt(&aead_nonce(nonce), ciphertext).ok()
    }
}

/// Dependency-free keyed test cipher: SHA-256 keystream XOR plus a truncated
/// SHA-256 tag. Deterministic and authenticated; not for production use.
#[derive(Debug, Default, Clone, Copy)]
pub struct XorHashSuite;

const XOR_TAG_LEN: usize = 16;

impl XorHashSuite {
    fn keystream_byte(key: &[u8; 32], nonce: u64, index: usize) -> u8 {
        let mut h = Sha256::new();
        h.update(key);
        h.update(b"keymesh/xor-stream/v1");
        h.update(nonce.to_be_bytes());
        h.update(((index / 32) as u64).to_be_bytes());
        h.finalize()[index % 32]
    }

    fn tag(key: &[u8; 32], nonce: u64, ciphertext: &[u8]) -> [u8; XOR_TAG_LEN] {
        let mut h = Sha256::new();
        h.update(key);
        h.update(b"keymesh/xor-tag/v1");
        h.update(nonce.to_be_bytes());
        h.update(ciphertext);
        h.finalize()[..XOR_TAG_LEN]
            .try_into()
            .expect("tag length fits the digest")
    }
}

impl CipherSuite for XorHashSuite {
    fn name(&self) -> &'static str {
        "xor-sha256"
    }

    fn seal(&self, key: &[u8; 32], nonce: u64, plaintext: &[u8]) -> Vec<u8> {
        let mut out: Vec<u8> = plaintext
            .iter()
            .enumerate()
            .map(|(i, b)| b ^ Self::keystream_byte(key, nonce, i))
            .collect();
        out.extend_from_slice(&Self::tag(key, nonce, &out));
        out
    }

    fn open(&self, key: &[u8; 32], nonce: u64, ciphertext: &[u8]) -> Option<Vec<u8>> {
        if ciphertext.len() < XOR_TAG_LEN {
            return None;
        }
        let (body, tag) = ciphertext.split_at(ciphertext.len() - XOR_TAG_LEN);
        if tag != Self::tag(key, nonce, body) {
            return None;
        }
        Some(
            body.iter()
                .enumerate()
                .map(|(i, b)| b ^ Self::keystream_byte(key, nonce, i))
                .collect(),
        )
    }
}

/// One sealed frame on the wire, as an eavesdropper would capture it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Envelope {
    pub hop_index: usize,
    pub from: NodeId,
    pub to: NodeId,
    pub key_id: KeyId,
    pub nonce: u64,
    pub ciphertext: Vec<u8>,
}

/// Outcome of one secure delivery.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeliveryReport {
    pub trace: PathTrace,
    /// Key used on each hop; length equals `hop_count`.
    pub key_ids: Vec<KeyId>,
    pub delivered_plaintext: Vec<u8>,
    pub hop_count: usize,
    pub success: bool,
    /// Frames put on the wire for this delivery. Exactly `hop_count`: there
    /// is no discovery or path-finding traffic.
    pub transmissions: u64,
    /// Full capture of the wire traffic, for eavesdropper analysis.
    pub transcript: Vec<Envelope>,
}

/// Corrupt one ciphertext byte of the frame sent at `hop_index`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Tamper {
    pub hop_index: usize,
    pub byte_index: usize,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SendOptions {
    pub tamper: Option<Tamper>,
}

/// What a set of captured nodes could read of one delivery.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EavesdropReport {
    pub can_read: bool,
    pub compromised_hops: Vec<usize>,
    pub hop_count: usize,
}

/// In-memory network simulation: the key graph plus per-node inboxes and
/// per-key nonce counters. One delivery is processed per call; the mutable
/// borrow serializes inbox access.
pub struct SimNetwork {
    graph: KeyGraph,
    cipher: Box<dyn CipherSuite>,
    nonces: BTreeMap<KeyId, u64>,
    inboxes: Vec<VecDeque<Envelope>>,
    transmissions_total: u64,
}

impl SimNetwork {
    pub fn new(graph: KeyGraph) -> SimNetwork {
        SimNetwork::with_cipher(graph, Box::new(ChaChaPolySuite))
    }

    pub fn with_cipher(graph: KeyGraph, cipher: Box<dyn CipherSuite>) -> SimNetwork {
        let n = graph.n() as usize;
        SimNetwork {
            graph,
            cipher,
            nonces: BTreeMap::new(),
            inboxes: vec![VecDeque::new(); n],
            transmissions_total: 0,
        }
    }

    pub fn graph(&self) -> &KeyGraph {
        &self.graph
    }

    pub fn cipher_name(&self) -> &'static str {
        self.cipher.name()
    }

    /// Total frames transmitted since the network was created.
    pub fn transmissions_total(&self) -> u64 {
        self.transmissions_total
    }

    fn allocate_nonce(&mut self, key_id: KeyId) -> u64 {
        let counter = self.nonces.entry(key_id).or_insert(0);
        let nonce = *counter;
        *counter += 1;
        nonce
    }

    /// Deliver `plaintext` from `src` to `dest` along the greedy route,
    /// sealing and re-sealing hop by hop.
    pub fn send_secure(
        &mut self,
        src: NodeId,
        dest: NodeId,
        plaintext: &[u8],
    ) -> Result<DeliveryReport> {
        self.send_secure_with(src, dest, plaintext, SendOptions::default())
    }

    pub fn send_secure_with(
        &mut self,
        src: NodeId,
        dest: NodeId,
        plaintext: &[u8],
        options: SendOptions,
    ) -> Result<DeliveryReport> {
        let n = self.graph.n();
        check_node(src, n)?;
        check_node(dest, n)?;
        if src == dest {
            return Err(Error::SameNode(src.index()));
        }
        if plaintext.is_empty() {
            return Err(Error::EmptyPlaintext);
        }
        let trace = router::route(src, dest, &self.graph)?;
        let mut payload = plaintext.to_vec();
        let mut key_ids = Vec::with_capacity(trace.hop_count());
        let mut transcript = Vec::with_capacity(trace.hop_count());
        let mut transmissions = 0u64;
        for (hop_index, pair) in trace.hops().windows(2).enumerate() {
            let (from, to) = (pair[0], pair[1]);
            // The sender seals with the key from its own ring.
            let key = self
                .graph
                .ring(from)?
                .get(&to)
                .expect("route steps over edges")
                .clone();
            let nonce = self.allocate_nonce(key.id());
            let mut ciphertext = self.cipher.seal(key.material(), nonce, &payload);
            if let Some(tamper) = options.tamper {
                if tamper.hop_index == hop_index && !ciphertext.is_empty() {
                    let at = tamper.byte_index % ciphertext.len();
                    ciphertext[at] ^= 0x01;
                }
            }
            let envelope = Envelope {
                hop_index,
                from,
                to,
                key_id: key.id(),
                nonce,
                ciphertext,
            };
            transcript.push(envelope.clone());
            self.inboxes[to.index() as usize].push_back(envelope);
            self.transmissions_total += 1;
            transmissions += 1;

            // The receiving node opens with the key from its own ring.
            let received = self.inboxes[to.index() as usize]
                .pop_front()
                .expect("frame was just enqueued");
            let receiver_key = self
                .graph
                .ring(received.to)?
                .get(&received.from)
                .expect("route steps over edges");
            payload = self
                .cipher
                .open(receiver_key.material(), received.nonce, &received.ciphertext)
                .ok_or(Error::AuthenticationFailure { hop: hop_index })?;
            key_ids.push(key.id());
        }
        let hop_count = trace.hop_count();
        Ok(DeliveryReport {
            trace,
            key_ids,
            delivered_plaintext: payload,
            hop_count,
            success: true,
            transmissions,
            transcript,
        })
    }

    /// Run one delivery and report what `adversary_nodes` could decrypt of
    /// the captured wire traffic using only the keys in their own rings.
    pub fn eavesdrop_check(
        &mut self,
        src: NodeId,
        dest: NodeId,
        plaintext: &[u8],
        adversary_nodes: &BTreeSet<NodeId>,
    ) -> Result<EavesdropReport> {
        let n = self.graph.n();
        for &a in adversary_nodes {
            check_node(a, n)?;
        }
        let report = self.send_secure(src, dest, plaintext)?;
        let mut compromised_hops = Vec::new();
        for envelope in &report.transcript {
            let readable = adversary_nodes.iter().any(|&adversary| {
                self.graph
                    .ring(adversary)
                    .expect("validated above")
                    .values()
                    .any(|key| {
                        self.cipher
                            .open(key.material(), envelope.nonce, &envelope.ciphertext)
                            .is_some()
                    })
            });
            if readable {
                compromised_hops.push(envelope.hop_index);
            }
        }
        Ok(EavesdropReport {
            can_read: !compromised_hops.is_empty(),
            compromised_hops,
            hop_count: report.hop_count,
        })
    }
}
