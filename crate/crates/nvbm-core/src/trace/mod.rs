//! Parsing of virtual-platform transaction logs.
//!
//! A VP log is ordinary line-oriented text. Lines carrying the
//! [`CSB_KEYWORD`] describe configuration-register transactions, lines
//! carrying the [`DBB_KEYWORD`] describe data-memory transactions; everything
//! else is simulator chatter and is ignored. A matched line consists of the
//! keyword followed by whitespace-separated `key=value` tokens in any order;
//! unknown tokens are skipped.

use thiserror::Error;

pub mod synth;

/// Log keyword marking a configuration-register transaction line.
pub const CSB_KEYWORD: &str = "nvdla.csb_adaptor";
/// Log keyword marking a data-backbone transaction line.
pub const DBB_KEYWORD: &str = "nvdla.dbb_adaptor";

/// One configuration-register transaction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsbTransaction {
    /// Ordinal position among CSB lines, 0-based, in log order.
    pub seq: usize,
    /// Register byte address.
    pub addr: u32,
    /// Value written, or value observed on a read.
    pub data: u32,
    pub is_write: bool,
}

/// One data-backbone transaction.
///
/// The payload is stored in memory order: the lowest-addressed byte first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DbbTransaction {
    /// Ordinal position among DBB lines, 0-based, in log order.
    pub seq: usize,
    /// Byte address in the VP memory space.
    pub addr: u64,
    /// Little-endian byte payload; length is a positive multiple of 4.
    pub payload: Vec<u8>,
    pub is_write: bool,
}

/// Ordered CSB and DBB transaction lists parsed from one log.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TraceBundle {
    pub csb: Vec<CsbTransaction>,
    pub dbb: Vec<DbbTransaction>,
    /// Free-text provenance label; not part of the log itself.
    pub source: String,
}

impl TraceBundle {
    pub fn is_empty(&self) -> bool {
        self.csb.is_empty() && self.dbb.is_empty()
    }
}

/// How [`parse_log`] reacts to a keyword line whose fields do not parse.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum ParseMode {
    /// Abort on the first malformed transaction line.
    #[default]
    Strict,
    /// Skip malformed lines with a warning.
    Lenient,
}

/// Error for a single transaction line, without log position.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum LineError {
    #[error("{0}")]
    Malformed(String),
    #[error("payload length {0} is not a positive multiple of 4")]
    PayloadLength(usize),
}

/// Error for a whole-log parse, carrying the 1-based line number.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum TraceError {
    #[error("line {line}: malformed transaction line: {reason}")]
    MalformedTransactionLine { line: usize, reason: String },
    #[error("line {line}: payload length {len} is not a positive multiple of 4")]
    PayloadLength { line: usize, len: usize },
}

impl TraceError {
    fn from_line(err: LineError, line: usize) -> Self {
        match err {
            LineError::Malformed(reason) => TraceError::MalformedTransactionLine { line, reason },
            LineError::PayloadLength(len) => TraceError::PayloadLength { line, len },
        }
    }
}

/// Parse a whole log into ordered transaction lists.
///
/// Relative order of matched lines is preserved; `seq` is assigned per list.
/// A line containing both keywords is treated as a CSB line.
pub fn parse_log(text: &str, mode: ParseMode) -> Result<TraceBundle, TraceError> {
    let mut bundle = TraceBundle::default();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        if line.contains(CSB_KEYWORD) {
            match parse_csb_line(line, bundle.csb.len()) {
                Ok(Some(tx)) => bundle.csb.push(tx),
                Ok(None) => unreachable!("keyword checked above"),
                Err(e) => handle_line_error(e, line_no, mode)?,
            }
        } else if line.contains(DBB_KEYWORD) {
            match parse_dbb_line(line, bundle.dbb.len()) {
                Ok(Some(tx)) => bundle.dbb.push(tx),
                Ok(None) => unreachable!("keyword checked above"),
                Err(e) => handle_line_error(e, line_no, mode)?,
            }
        }
    }
    Ok(bundle)
}

fn handle_line_error(err: LineError, line: usize, mode: ParseMode) -> Result<(), TraceError> {
    match mode {
        ParseMode::Strict => Err(TraceError::from_line(err, line)),
        ParseMode::Lenient => {
            log::warn!("line {line}: skipping malformed transaction line: {err}");
            Ok(())
        }
    }
}

/// Parse one line as a CSB transaction with the given `seq`.
///
/// Returns `Ok(None)` when the line does not carry the CSB keyword.
pub fn parse_csb_line(line: &str, seq: usize) -> Result<Option<CsbTransaction>, LineError> {
    let Some(rest) = after_keyword(line, CSB_KEYWORD) else {
        return Ok(None);
    };
    let fields = scan_fields(rest)?;
    let is_write = fields.require_iswrite()?;
    let addr = parse_hex(fields.require("addr")?, 32)? as u32;
    let data = parse_hex(fields.require("data")?, 32)? as u32;
    Ok(Some(CsbTransaction {
        seq,
        addr,
        data,
        is_write,
    }))
}

/// Parse one line as a DBB transaction with the given `seq`.
///
/// The `data` value is stored into the payload little-endian (lowest byte at
/// the lowest address). `len` defaults to the byte width of the `data` hex
/// string and must be a positive multiple of 4.
pub fn parse_dbb_line(line: &str, seq: usize) -> Result<Option<DbbTransaction>, LineError> {
    let Some(rest) = after_keyword(line, DBB_KEYWORD) else {
        return Ok(None);
    };
    let fields = scan_fields(rest)?;
    let is_write = fields.require_iswrite()?;
    let addr = parse_hex(fields.require("addr")?, 64)?;
    let data = fields.require("data")?;
    let digits = hex_digits(data)?;
    let len = match fields.get("len") {
        Some(tok) => tok
            .parse::<usize>()
            .map_err(|_| LineError::Malformed(format!("len is not a decimal count: '{tok}'")))?,
        None => digits.len().div_ceil(2),
    };
    if len == 0 || len % 4 != 0 {
        return Err(LineError::PayloadLength(len));
    }
    let payload = hex_to_le_bytes(digits, len)?;
    if addr.checked_add(len as u64).is_none() {
        return Err(LineError::Malformed(format!(
            "address 0x{addr:x} + length {len} wraps the 64-bit space"
        )));
    }
    Ok(Some(DbbTransaction {
        seq,
        addr,
        payload,
        is_write,
    }))
}

/// Everything after the keyword, with one optional `:` separator dropped.
fn after_keyword<'a>(line: &'a str, keyword: &str) -> Option<&'a str> {
    let pos = line.find(keyword)?;
    let rest = &line[pos + keyword.len()..];
    Some(rest.strip_prefix(':').unwrap_or(rest))
}

struct Fields<'a> {
    pairs: Vec<(&'a str, &'a str)>,
}

impl<'a> Fields<'a> {
    fn get(&self, key: &str) -> Option<&'a str> {
        self.pairs.iter().find(|(k, _)| *k == key).map(|(_, v)| *v)
    }

    fn require(&self, key: &str) -> Result<&'a str, LineError> {
        self.get(key)
            .ok_or_else(|| LineError::Malformed(format!("missing required field '{key}'")))
    }

    fn require_iswrite(&self) -> Result<bool, LineError> {
        match self.require("iswrite")? {
            "0" => Ok(false),
            "1" => Ok(true),
            other => Err(LineError::Malformed(format!(
                "iswrite must be 0 or 1, got '{other}'"
            ))),
        }
    }
}

/// Collect `key=value` tokens; tokens without `=` are ignored as chatter.
fn scan_fields(rest: &str) -> Result<Fields<'_>, LineError> {
    let pairs = rest
        .split_whitespace()
        .filter_map(|tok| tok.split_once('='))
        .collect();
    Ok(Fields { pairs })
}

fn hex_digits(tok: &str) -> Result<&str, LineError> {
    let digits = tok
        .strip_prefix("0x")
        .or_else(|| tok.strip_prefix("0X"))
        .ok_or_else(|| LineError::Malformed(format!("expected 0x-prefixed hex, got '{tok}'")))?;
    if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_hexdigit()) {
        return Err(LineError::Malformed(format!("invalid hex value '{tok}'")));
    }
    Ok(digits)
}

fn parse_hex(tok: &str, bits: u32) -> Result<u64, LineError> {
    let digits = hex_digits(tok)?;
    let value = u64::from_str_radix(digits, 16)
        .map_err(|_| LineError::Malformed(format!("hex value '{tok}' does not fit in 64 bits")))?;
    if bits < 64 && value >> bits != 0 {
        return Err(LineError::Malformed(format!(
            "value '{tok}' does not fit in {bits} bits"
        )));
    }
    Ok(value)
}

/// Expand a hex value string into exactly `len` little-endian bytes.
fn hex_to_le_bytes(digits: &str, len: usize) -> Result<Vec<u8>, LineError> {
    // Normalize to an even digit count so pairs map to bytes.
    let padded;
    let digits = if digits.len() % 2 == 1 {
        padded = format!("0{digits}");
        &padded
    } else {
        digits
    };
    let mut bytes: Vec<u8> = (0..digits.len() / 2)
        .rev() // last hex pair is the lowest-addressed byte
        .map(|i| u8::from_str_radix(&digits[2 * i..2 * i + 2], 16).expect("checked hex"))
        .collect();
    if bytes.len() > len {
        if bytes[len..].iter().any(|&b| b != 0) {
            return Err(LineError::Malformed(format!(
                "data value is wider than len={len} bytes"
            )));
        }
        bytes.truncate(len);
    } else {
        bytes.resize(len, 0);
    }
    Ok(bytes)
}

/// Render a bundle back into canonical log text (CSB lines, then DBB lines).
///
/// `parse_log` on the result reproduces the bundle's transaction lists.
pub fn render_log(bundle: &TraceBundle) -> String {
    let mut out = String::new();
    for tx in &bundle.csb {
        out.push_str(&render_csb_line(tx));
        out.push('\n');
    }
    for tx in &bundle.dbb {
        out.push_str(&render_dbb_line(tx));
        out.push('\n');
    }
    out
}

pub(crate) fn render_csb_line(tx: &CsbTransaction) -> String {
    format!(
        "{CSB_KEYWORD}: iswrite={} addr=0x{:08x} data=0x{:08x}",
        tx.is_write as u32, tx.addr, tx.data
    )
}

pub(crate) fn render_dbb_line(tx: &DbbTransaction) -> String {
    let mut hex = String::with_capacity(2 * tx.payload.len());
    for b in tx.payload.iter().rev() {
        hex.push_str(&format!("{b:02x}"));
    }
    format!(
        "{DBB_KEYWORD}: iswrite={} addr=0x{:x} data=0x{} len={}",
        tx.is_write as u32,
        tx.addr,
        hex,
        tx.payload.len()
    )
}
