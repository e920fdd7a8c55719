use std::sync::OnceLock;

const TABLE_LEN: usize = 256;
// Remapped bytes land in 256..=323.
const MAX_CODEPOINT: usize = 323;

/// Bijection between the 256 byte values and 256 printable codepoints.
///
/// Bytes in `0x21..=0x7E`, `0xA1..=0xAC` and `0xAE..=0xFF` map to the
/// codepoint of the same value. The remaining 68 bytes map, in ascending
/// byte order, to `U+0100`, `U+0101`, ...
#[derive(Debug)]
pub struct ByteUnicodeTable {
    to_char: [char; TABLE_LEN],
    to_byte: [Option<u8>; MAX_CODEPOINT + 1],
}

impl ByteUnicodeTable {
    pub fn get() -> &'static ByteUnicodeTable {
        static TABLE: OnceLock<ByteUnicodeTable> = OnceLock::new();
        TABLE.get_or_init(ByteUnicodeTable::build)
    }

    fn build() -> Self {
        let mut to_char = ['\0'; TABLE_LEN];
        let mut to_byte = [None; MAX_CODEPOINT + 1];
        let mut next = 256u32;
        for b in 0..=255u8 {
            let cp = if is_printable(b) {
                u32::from(b)
            } else {
                let cp = next;
                next += 1;
                cp
            };
            let c = char::from_u32(cp).expect("table codepoints are valid scalars");
            to_char[usize::from(b)] = c;
            to_byte[cp as usize] = Some(b);
        }
        debug_assert_eq!(next as usize, MAX_CODEPOINT + 1);
        Self { to_char, to_byte }
    }

    #[inline]
    pub fn byte_to_char(&self, b: u8) -> char {
        self.to_char[usize::from(b)]
    }

    #[inline]
    pub fn char_to_byte(&self, c: char) -> Option<u8> {
        self.to_byte.get(c as usize).copied().flatten()
    }

    /// Maps raw bytes to their byte-level symbol string.
    pub fn encode_bytes(&self, bytes: &[u8]) -> String {
        bytes.iter().map(|&b| self.byte_to_char(b)).collect()
    }

    /// Maps a byte-level symbol string back to raw bytes. `None` if any
    /// character lies outside the table.
    pub fn decode_symbols(&self, symbols: &str) -> Option<Vec<u8>> {
        symbols.chars().map(|c| self.char_to_byte(c)).collect()
    }
}

fn is_printable(b: u8) -> bool {
    matches!(b, 0x21..=0x7E | 0xA1..=0xAC | 0xAE..=0xFF)
}
