//! `QSV1` state files: the magic `QSV1`, `u8` d, `u32` L, `f64` energy, J, h
//! and p, then `d^L` amplitudes as little-endian `(re, im)` f64 pairs.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::Path;

use mana_core::{Complex64, PrimeDim, StateVector};

pub const MAGIC: &[u8; 4] = b"QSV1";
pub const HEADER_LEN: usize = 4 + 1 + 4 + 4 * 8;

/// A state together with the model parameters it came from. `p` is NaN for
/// the plain Potts chain.
#[derive(Clone, Debug, PartialEq)]
pub struct StateFile {
    pub energy: f64,
    pub j: f64,
    pub h: f64,
    pub p: f64,
    pub psi: StateVector,
}

impl StateFile {
    pub fn write_to<W: Write>(&self, mut w: W) -> io::Result<()> {
        let d = self.psi.dim().d();
        w.write_all(MAGIC)?;
        w.write_all(&[d as u8])?;
        w.write_all(&(self.psi.n_sites() as u32).to_le_bytes())?;
        for x in [self.energy, self.j, self.h, self.p] {
            w.write_all(&x.to_le_bytes())?;
        }
        for c in self.psi.amplitudes() {
            w.write_all(&c.re.to_le_bytes())?;
            w.write_all(&c.im.to_le_bytes())?;
        }
        w.flush()
    }

    pub fn read_from<R: Read>(mut r: R) -> io::Result<Self> {
        let mut head = [0u8; HEADER_LEN];
        r.read_exact(&mut head)?;
        if &head[..4] != MAGIC {
            return Err(invalid("missing QSV1 magic"));
        }
        let dim = PrimeDim::new(head[4] as u32).map_err(|e| invalid(&e.to_string()))?;
        let n_sites = u32::from_le_bytes(head[5..9].try_into().unwrap()) as usize;
        let f = |i: usize| f64::from_le_bytes(head[9 + 8 * i..17 + 8 * i].try_into().unwrap());
        let len = mana_core::state::checked_len(dim, n_sites).map_err(|e| invalid(&e.to_string()))?;
        let mut body = vec![0u8; 16 * len];
        r.read_exact(&mut body)?;
        let mut extra = [0u8; 1];
        if r.read(&mut extra)? != 0 {
            return Err(invalid("trailing bytes after amplitudes"));
        }
        let amps = body
            .chunks_exact(16)
            .map(|c| {
                Complex64::new(
                    f64::from_le_bytes(c[..8].try_into().unwrap()),
                    f64::from_le_bytes(c[8..].try_into().unwrap()),
                )
            })
            .collect();
        let psi = StateVector::new(dim, n_sites, amps).map_err(|e| invalid(&e.to_string()))?;
        Ok(StateFile {
            energy: f(0),
            j: f(1),
            h: f(2),
            p: f(3),
            psi,
        })
    }

    pub fn save(&self, path: &Path) -> io::Result<()> {
        self.write_to(BufWriter::new(File::create(path)?))
    }

    pub fn load(path: &Path) -> io::Result<Self> {
        Self::read_from(BufReader::new(File::open(path)?))
    }

    pub fn is_extended(&self) -> bool {
        !self.p.is_nan()
    }
}

fn invalid(msg: &str) -> io::Error {
    io::Error::new(io::ErrorKind::InvalidData, msg.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> StateFile {
        let psi = StateVector::basis(PrimeDim::qutrit(), 2, 4).unwrap();
        StateFile {
            energy: -1.25,
            j: 1.0,
            h: 0.5,
            p: f64::NAN,
            psi,
        }
    }

    #[test]
    fn layout() {
        let mut buf = Vec::new();
        sample().write_to(&mut buf).unwrap();
        assert_eq!(buf.len(), HEADER_LEN + 16 * 9);
        assert_eq!(&buf[..5], b"QSV1\x03");
        assert_eq!(&buf[5..9], &2u32.to_le_bytes());
        assert_eq!(&buf[9..17], &(-1.25f64).to_le_bytes());
        // amplitude 4 is the only nonzero one
        assert_eq!(&buf[HEADER_LEN + 64..HEADER_LEN + 72], &1f64.to_le_bytes());
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let s = sample();
        let mut buf = Vec::new();
        s.write_to(&mut buf).unwrap();
        let back = StateFile::read_from(buf.as_slice()).unwrap();
        assert_eq!(back.p.to_bits(), s.p.to_bits());
        assert_eq!(back.psi, s.psi);
        let mut again = Vec::new();
        back.write_to(&mut again).unwrap();
        assert_eq!(buf, again);
    }

    #[test]
    fn rejects_corrupt_input() {
        let mut buf = Vec::new();
        sample().write_to(&mut buf).unwrap();
        assert!(StateFile::read_from(&buf[..buf.len() - 1]).is_err());
        let mut long = buf.clone();
        long.push(0);
        assert!(StateFile::read_from(long.as_slice()).is_err());
        buf[0] = b'X';
        assert!(StateFile::read_from(buf.as_slice()).is_err());
    }
}
