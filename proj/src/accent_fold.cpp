#include <cstddef>
#include <cstdint>
#include <iterator>
#include <string>
#include <string_view>

#include "emtk/preprocess.hpp"

namespace emtk {
namespace {

struct Fold {
  char32_t code;
  const char* ascii;
};

// Latin-1 Supplement and Latin Extended-A letters.
constexpr Fold kFoldTable[] = {
    {0xC0, "A"}, {0xC1, "A"}, {0xC2, "A"}, {0xC3, "A"}, {0xC4, "A"}, {0xC5, "A"}, {0xC6, "AE"},
    {0xC7, "C"}, {0xC8, "E"}, {0xC9, "E"}, {0xCA, "E"}, {0xCB, "E"}, {0xCC, "I"}, {0xCD, "I"},
    {0xCE, "I"}, {0xCF, "I"}, {0xD0, "D"}, {0xD1, "N"}, {0xD2, "O"}, {0xD3, "O"}, {0xD4, "O"},
    {0xD5, "O"}, {0xD6, "O"}, {0xD8, "O"}, {0xD9, "U"}, {0xDA, "U"}, {0xDB, "U"}, {0xDC, "U"},
    {0xDD, "Y"}, {0xDE, "Th"}, {0xDF, "ss"}, {0xE0, "a"}, {0xE1, "a"}, {0xE2, "a"}, {0xE3, "a"},
    {0xE4, "a"}, {0xE5, "a"}, {0xE6, "ae"}, {0xE7, "c"}, {0xE8, "e"}, {0xE9, "e"}, {0xEA, "e"},
    {0xEB, "e"}, {0xEC, "i"}, {0xED, "i"}, {0xEE, "i"}, {0xEF, "i"}, {0xF0, "d"}, {0xF1, "n"},
    {0xF2, "o"}, {0xF3, "o"}, {0xF4, "o"}, {0xF5, "o"}, {0xF6, "o"}, {0xF8, "o"}, {0xF9, "u"},
    {0xFA, "u"}, {0xFB, "u"}, {0xFC, "u"}, {0xFD, "y"}, {0xFE, "th"}, {0xFF, "y"}, {0x100, "A"},
    {0x101, "a"}, {0x102, "A"}, {0x103, "a"}, {0x104, "A"}, {0x105, "a"}, {0x106, "C"},
    {0x107, "c"}, {0x108, "C"}, {0x109, "c"}, {0x10A, "C"}, {0x10B, "c"}, {0x10C, "C"},
    {0x10D, "c"}, {0x10E, "D"}, {0x10F, "d"}, {0x110, "D"}, {0x111, "d"}, {0x112, "E"},
    {0x113, "e"}, {0x114, "E"}, {0x115, "e"}, {0x116, "E"}, {0x117, "e"}, {0x118, "E"},
    {0x119, "e"}, {0x11A, "E"}, {0x11B, "e"}, {0x11C, "G"}, {0x11D, "g"}, {0x11E, "G"},
    {0x11F, "g"}, {0x120, "G"}, {0x121, "g"}, {0x122, "G"}, {0x123, "g"}, {0x124, "H"},
    {0x125, "h"}, {0x126, "H"}, {0x127, "h"}, {0x128, "I"}, {0x129, "i"}, {0x12A, "I"},
    {0x12B, "i"}, {0x12C, "I"}, {0x12D, "i"}, {0x12E, "I"}, {0x12F, "i"}, {0x130, "I"},
    {0x131, "i"}, {0x132, "IJ"}, {0x133, "ij"}, {0x134, "J"}, {0x135, "j"}, {0x136, "K"},
    {0x137, "k"}, {0x138, "k"}, {0x139, "L"}, {0x13A, "l"}, {0x13B, "L"}, {0x13C, "l"},
    {0x13D, "L"}, {0x13E, "l"}, {0x13F, "L"}, {0x140, "l"}, {0x141, "L"}, {0x142, "l"},
    {0x143, "N"}, {0x144, "n"}, {0x145, "N"}, {0x146, "n"}, {0x147, "N"}, {0x148, "n"},
    {0x149, "n"}, {0x14A, "N"}, {0x14B, "n"}, {0x14C, "O"}, {0x14D, "o"}, {0x14E, "O"},
    {0x14F, "o"}, {0x150, "O"}, {0x151, "o"}, {0x152, "OE"}, {0x153, "oe"}, {0x154, "R"},
    {0x155, "r"}, {0x156, "R"}, {0x157, "r"}, {0x158, "R"}, {0x159, "r"}, {0x15A, "S"},
    {0x15B, "s"}, {0x15C, "S"}, {0x15D, "s"}, {0x15E, "S"}, {0x15F, "s"}, {0x160, "S"},
    {0x161, "s"}, {0x162, "T"}, {0x163, "t"}, {0x164, "T"}, {0x165, "t"}, {0x166, "T"},
    {0x167, "t"}, {0x168, "U"}, {0x169, "u"}, {0x16A, "U"}, {0x16B, "u"}, {0x16C, "U"},
    {0x16D, "u"}, {0x16E, "U"}, {0x16F, "u"}, {0x170, "U"}, {0x171, "u"}, {0x172, "U"},
    {0x173, "u"}, {0x174, "W"}, {0x175, "w"}, {0x176, "Y"}, {0x177, "y"}, {0x178, "Y"},
    {0x179, "Z"}, {0x17A, "z"}, {0x17B, "Z"}, {0x17C, "z"}, {0x17D, "Z"}, {0x17E, "z"},
    {0x17F, "s"},
};
const char* fold_code_point(char32_t cp) {
  switch (cp) {
    case 0x2018:
    case 0x2019:
    case 0x02BC: return "'";
    case 0x201C:
    case 0x201D: return "\"";
    case 0x2013:
    case 0x2014: return "-";
    default: break;
  }
  // The table is sorted by code point.
  std::size_t lo = 0;
  std::size_t hi = std::size(kFoldTable);
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    if (kFoldTable[mid].code < cp) {
      lo = mid + 1;
    } else {
      hi = mid;
    }
  }
  if (lo < std::size(kFoldTable) && kFoldTable[lo].code == cp) return kFoldTable[lo].ascii;
  return nullptr;
}

// Decodes one UTF-8 sequence at s[i]. Returns the byte length, or 0 when the
// sequence is malformed.
std::size_t decode_utf8(std::string_view s, std::size_t i, char32_t& cp) {
  const auto b0 = static_cast<unsigned char>(s[i]);
  std::size_t len = 0;
  if (b0 < 0x80) {
    cp = b0;
    return 1;
  }
  if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
  } else {
    return 0;
  }
  if (i + len > s.size()) return 0;
  for (std::size_t k = 1; k < len; ++k) {
    const auto b = static_cast<unsigned char>(s[i + k]);
    if ((b & 0xC0) != 0x80) return 0;
    cp = (cp << 6) | (b & 0x3F);
  }
  return len;
}

}  // namespace

std::string fold_accents(std::string_view utf8) {
  std::string out;
  out.reserve(utf8.size());
  std::size_t i = 0;
  while (i < utf8.size()) {
    char32_t cp = 0;
    const std::size_t len = decode_utf8(utf8, i, cp);
    if (len == 0) {
      out.push_back(' ');
      ++i;
      continue;
    }
    if (len == 1) {
      out.push_back(static_cast<char>(cp));
    } else if (const char* ascii = fold_code_point(cp)) {
      out += ascii;
    } else {
      out.push_back(' ');
    }
    i += len;
  }
  return out;
}

}  // namespace emtk
