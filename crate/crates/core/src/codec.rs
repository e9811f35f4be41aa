//! Little-endian binary encoding shared by every index section.

use crate::error::{Error, Result};

#[derive(Default)]
pub(crate) struct Writer {
    buf: Vec<u8>,
}

impl Writer {
    pub(crate) fn new() -> Self {
        Self::default()
    }

    pub(crate) fn into_bytes(self) -> Vec<u8> {
        self.buf
    }

    pub(crate) fn u8(&mut self, v: u8) {
        self.buf.push(v);
    }

    pub(crate) fn u32(&mut self, v: u32) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    pub(crate) fn u64(&mut self, v: u64) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    pub(crate) fn f64(&mut self, v: f64) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    pub(crate) fn bytes(&mut self, v: &[u8]) {
        self.u64(v.len() as u64);
        self.buf.extend_from_slice(v);
    }

    pub(crate) fn u32s(&mut self, v: &[u32]) {
        self.u64(v.len() as u64);
        for &x in v {
            self.u32(x);
        }
    }

    pub(crate) fn u64s(&mut self, v: &[u64]) {
        self.u64(v.len() as u64);
        for &x in v {
            self.u64(x);
        }
    }

    /// LEB128, for values that are usually small.
    pub(crate) fn var(&mut self, v: u64) {
        leb128::write::unsigned(&mut self.buf, v).expect("writing to a Vec");
    }

    /// Writes `body` prefixed with its byte length.
    pub(crate) fn section(&mut self, body: Vec<u8>) {
        self.bytes(&body);
    }
}

pub(crate) struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    pub(crate) fn new(buf: &'a [u8]) -> Self {
        Self { buf, pos: 0 }
    }

    pub(crate) fn remaining(&self) -> usize {
        self.buf.len() - self.pos
    }

    pub(crate) fn is_empty(&self) -> bool {
        self.remaining() == 0
    }

    fn take(&mut self, k: usize) -> Result<&'a [u8]> {
        if self.remaining() < k {
            return Err(Error::Format(format!(
                "truncated input: wanted {k} bytes at offset {}, {} left",
                self.pos,
                self.remaining()
            )));
        }
        let out = &self.buf[self.pos..self.pos + k];
        self.pos += k;
        Ok(out)
    }

    pub(crate) fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    pub(crate) fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    pub(crate) fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    pub(crate) fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    /// A `u64` that must fit in memory-sized quantities.
    pub(crate) fn len(&mut self) -> Result<usize> {
        let v = self.u64()?;
        usize::try_from(v).map_err(|_| Error::Format(format!("length {v} overflows usize")))
    }

    pub(crate) fn var(&mut self) -> Result<u64> {
        let mut rest = &self.buf[self.pos..];
        let before = rest.len();
        let v = leb128::read::unsigned(&mut rest)
            .map_err(|e| Error::Format(format!("bad varint at offset {}: {e}", self.pos)))?;
        self.pos += before - rest.len();
        Ok(v)
    }

    pub(crate) fn var_len(&mut self) -> Result<usize> {
        let v = self.var()?;
        usize::try_from(v).map_err(|_| Error::Format(format!("length {v} overflows usize")))
    }

    pub(crate) fn bytes(&mut self) -> Result<&'a [u8]> {
        let k = self.len()?;
        self.take(k)
    }

    pub(crate) fn u32s(&mut self) -> Result<Vec<u32>> {
        let k = self.len()?;
        if k > self.remaining() / 4 {
            return Err(Error::Format(format!("array of {k} u32 exceeds input")));
        }
        (0..k).map(|_| self.u32()).collect()
    }

    pub(crate) fn u64s(&mut self) -> Result<Vec<u64>> {
        let k = self.len()?;
        if k > self.remaining() / 8 {
            return Err(Error::Format(format!("array of {k} u64 exceeds input")));
        }
        (0..k).map(|_| self.u64()).collect()
    }

    pub(crate) fn section(&mut self) -> Result<Reader<'a>> {
        Ok(Reader::new(self.bytes()?))
    }

    pub(crate) fn finish(&self, what: &str) -> Result<()> {
        if self.is_empty() {
            Ok(())
        } else {
            Err(Error::Format(format!("{} trailing bytes after {what}", self.remaining())))
        }
    }
}
