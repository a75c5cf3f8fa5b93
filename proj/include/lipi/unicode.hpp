/*!
 * Copyright (c) 2026 the lipi authors. All rights reserved.
 * Licensed under the Apache License, Version 2.0. See LICENSE in the project root.
 */
#pragma once

#include <string>
#include <string_view>

namespace lipi::unicode {

/// Decodes UTF-8 into code points. Each invalid byte decodes to U+FFFD.
std::u32string decode_utf8(std::string_view bytes);

std::string encode_utf8(std::u32string_view code_points);

// Canonical composition (NFC) scoped to the Devanagari block (U+0900-U+097F):
// decomposes the block's precomposed nukta letters, sorts combining marks by
// canonical combining class, and recomposes the pairs Unicode does not
// exclude. Code points outside the block pass through unchanged.
std::u32string nfc_devanagari(std::u32string_view code_points);

/// decode -> nfc_devanagari -> encode.
std::string nfc_devanagari_utf8(std::string_view text);

/// Canonical combining class for the Devanagari block; 0 elsewhere.
int combining_class(char32_t cp);

}  // namespace lipi::unicode
