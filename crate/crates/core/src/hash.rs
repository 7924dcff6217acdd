use unicode_normalization::UnicodeNormalization;

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

pub fn fnv1a64(bytes: &[u8]) -> u64 {
    bytes.iter().fold(FNV_OFFSET, |h, b| (h ^ u64::from(*b)).wrapping_mul(FNV_PRIME))
}

/// FNV-1a 64 over the NFKC form of `text`.
pub fn content_hash(text: &str) -> u64 {
    let nfkc: String = text.nfkc().collect();
    fnv1a64(nfkc.as_bytes())
}

pub fn content_hash_hex(text: &str) -> String {
    format!("{:016x}", content_hash(text))
}
