//! Binary epoch and raw-recording containers.
//!
//! All integers and floats are little-endian; strings are a `u32` byte
//! length followed by UTF-8 bytes. Signal payloads are `f32` µV.
//!
//! Epoch file (`.epochs`):
//!
//! ```text
//! magic      8 bytes  "NREPOCH1"
//! version    u32      1
//! participant string
//! fs         f64      Hz
//! n_channels u32, then n_channels strings (channel names)
//! n_samples  u32      samples per epoch
//! n_epochs   u64
//! per epoch:
//!   block    u32
//!   label    u8       0 unlabeled, 1 relevant, 2 irrelevant
//!   word     string
//!   doc      string   source document id, empty when unknown
//!   data     f32 × n_channels·n_samples, channel-major rows
//! ```
//!
//! Raw recording file (`.raw`):
//!
//! ```text
//! magic      8 bytes  "NRRAWEG1"
//! version    u32      1
//! participant string
//! fs         f64
//! n_channels u32, then channel-name strings
//! n_samples  u64
//! data       f32 × n_channels·n_samples, channel-major
//! n_events   u64
//! per event: sample u64, block u32, kind u8 (0 word, 1 separator),
//!            label u8, word string, doc string
//! ```

use std::io::{Read, Write};
use std::path::Path;

use byteorder::{LittleEndian as LE, ReadBytesExt, WriteBytesExt};

use super::types::{Epoch, Event, Label, Recording, StimulusKind};
use crate::error::{Error, Result};

const EPOCH_MAGIC: &[u8; 8] = b"NREPOCH1";
const RAW_MAGIC: &[u8; 8] = b"NRRAWEG1";
const VERSION: u32 = 1;

/// The epochs of one participant together with the header fields.
#[derive(Debug, Clone, PartialEq)]
pub struct EpochSet {
    pub participant: String,
    pub fs: f64,
    pub channel_names: Vec<String>,
    pub n_samples: usize,
    pub epochs: Vec<Epoch>,
}

fn write_str<W: Write>(w: &mut W, s: &str) -> std::io::Result<()> {
    w.write_u32::<LE>(s.len() as u32)?;
    w.write_all(s.as_bytes())
}

fn read_str<R: Read>(r: &mut R) -> std::io::Result<String> {
    let len = r.read_u32::<LE>()? as usize;
    let mut buf = vec![0u8; len];
    r.read_exact(&mut buf)?;
    String::from_utf8(buf).map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, e))
}

fn invalid(msg: impl Into<String>) -> std::io::Error {
    std::io::Error::new(std::io::ErrorKind::InvalidData, msg.into())
}

impl EpochSet {
    pub fn write_to<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        w.write_all(EPOCH_MAGIC)?;
        w.write_u32::<LE>(VERSION)?;
        write_str(w, &self.participant)?;
        w.write_f64::<LE>(self.fs)?;
        w.write_u32::<LE>(self.channel_names.len() as u32)?;
        for name in &self.channel_names {
            write_str(w, name)?;
        }
        w.write_u32::<LE>(self.n_samples as u32)?;
        w.write_u64::<LE>(self.epochs.len() as u64)?;
        let expected = self.channel_names.len() * self.n_samples;
        for e in &self.epochs {
            if e.data.len() != expected {
                return Err(invalid(format!(
                    "epoch {:?} has {} values, header implies {expected}",
                    e.word,
                    e.data.len()
                )));
            }
            w.write_u32::<LE>(e.block)?;
            w.write_u8(e.label.code())?;
            write_str(w, &e.word)?;
            write_str(w, e.doc.as_deref().unwrap_or(""))?;
            for &v in &e.data {
                w.write_f32::<LE>(v as f32)?;
            }
        }
        Ok(())
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut buf = Vec::new();
        self.write_to(&mut buf).expect("in-memory write");
        buf
    }

    /// Parse an epoch file. Errors carry the index of the failing record
    /// (0 for the header, epoch `i` as `i + 1`).
    pub fn read_from<R: Read>(r: &mut R) -> std::result::Result<Self, (usize, std::io::Error)> {
        let header = |r: &mut R| -> std::io::Result<(String, f64, Vec<String>, usize, u64)> {
            let mut magic = [0u8; 8];
            r.read_exact(&mut magic)?;
            if &magic != EPOCH_MAGIC {
                return Err(invalid("not an epoch file"));
            }
            let version = r.read_u32::<LE>()?;
            if version != VERSION {
                return Err(invalid(format!("unsupported version {version}")));
            }
            let participant = read_str(r)?;
            let fs = r.read_f64::<LE>()?;
            let n_channels = r.read_u32::<LE>()? as usize;
            let names = (0..n_channels).map(|_| read_str(r)).collect::<std::io::Result<Vec<_>>>()?;
            let n_samples = r.read_u32::<LE>()? as usize;
            let n_epochs = r.read_u64::<LE>()?;
            if !(fs > 0.0) {
                return Err(invalid("sampling rate must be positive"));
            }
            Ok((participant, fs, names, n_samples, n_epochs))
        };
        let (participant, fs, channel_names, n_samples, n_epochs) = header(r).map_err(|e| (0, e))?;
        let n_values = channel_names.len() * n_samples;
        let mut epochs = Vec::new();
        for i in 0..n_epochs as usize {
            let read_epoch = |r: &mut R| -> std::io::Result<Epoch> {
                let block = r.read_u32::<LE>()?;
                let code = r.read_u8()?;
                let label = Label::from_code(code).ok_or_else(|| invalid(format!("bad label code {code}")))?;
                let word = read_str(r)?;
                let doc = read_str(r)?;
                let mut data = vec![0.0f64; n_values];
                for v in data.iter_mut() {
                    *v = f64::from(r.read_f32::<LE>()?);
                }
                Ok(Epoch {
                    n_channels: channel_names.len(),
                    n_samples,
                    fs,
                    data,
                    word,
                    block,
                    label,
                    doc: (!doc.is_empty()).then_some(doc),
                })
            };
            epochs.push(read_epoch(r).map_err(|e| (i + 1, e))?);
        }
        Ok(EpochSet {
            participant,
            fs,
            channel_names,
            n_samples,
            epochs,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        Self::read_from(&mut bytes.as_slice()).map_err(|(record, e)| Error::malformed(path, record, e))
    }
}

impl Recording {
    pub fn write_to<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        w.write_all(RAW_MAGIC)?;
        w.write_u32::<LE>(VERSION)?;
        write_str(w, &self.participant)?;
        w.write_f64::<LE>(self.fs)?;
        w.write_u32::<LE>(self.channel_names.len() as u32)?;
        for name in &self.channel_names {
            write_str(w, name)?;
        }
        let n = self.n_samples();
        w.write_u64::<LE>(n as u64)?;
        for ch in &self.data {
            if ch.len() != n {
                return Err(invalid("channels differ in length"));
            }
            for &v in ch {
                w.write_f32::<LE>(v as f32)?;
            }
        }
        w.write_u64::<LE>(self.events.len() as u64)?;
        for ev in &self.events {
            w.write_u64::<LE>(ev.sample as u64)?;
            w.write_u32::<LE>(ev.block)?;
            w.write_u8(match ev.kind {
                StimulusKind::Word => 0,
                StimulusKind::Separator => 1,
            })?;
            w.write_u8(ev.label.code())?;
            write_str(w, &ev.word)?;
            write_str(w, ev.doc.as_deref().unwrap_or(""))?;
        }
        Ok(())
    }

    pub fn read_from<R: Read>(r: &mut R) -> std::io::Result<Self> {
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != RAW_MAGIC {
            return Err(invalid("not a raw recording file"));
        }
        let version = r.read_u32::<LE>()?;
        if version != VERSION {
            return Err(invalid(format!("unsupported version {version}")));
        }
        let participant = read_str(r)?;
        let fs = r.read_f64::<LE>()?;
        let n_channels = r.read_u32::<LE>()? as usize;
        let channel_names = (0..n_channels).map(|_| read_str(r)).collect::<std::io::Result<Vec<_>>>()?;
        let n = r.read_u64::<LE>()? as usize;
        let mut data = Vec::with_capacity(n_channels);
        for _ in 0..n_channels {
            let mut ch = vec![0.0; n];
            for v in ch.iter_mut() {
                *v = f64::from(r.read_f32::<LE>()?);
            }
            data.push(ch);
        }
        let n_events = r.read_u64::<LE>()?;
        let mut events = Vec::new();
        for _ in 0..n_events {
            let sample = r.read_u64::<LE>()? as usize;
            let block = r.read_u32::<LE>()?;
            let kind = match r.read_u8()? {
                0 => StimulusKind::Word,
                1 => StimulusKind::Separator,
                k => return Err(invalid(format!("bad stimulus kind {k}"))),
            };
            let code = r.read_u8()?;
            let label = Label::from_code(code).ok_or_else(|| invalid(format!("bad label code {code}")))?;
            let word = read_str(r)?;
            let doc = read_str(r)?;
            if sample >= n {
                return Err(invalid(format!("event at sample {sample} beyond {n} samples")));
            }
            events.push(Event {
                sample,
                word,
                block,
                kind,
                label,
                doc: (!doc.is_empty()).then_some(doc),
            });
        }
        Ok(Recording {
            participant,
            channel_names,
            fs,
            data,
            events,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        Self::read_from(&mut bytes.as_slice()).map_err(|e| Error::malformed(path, 0, e))
    }
}
