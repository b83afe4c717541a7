#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace stepsvm {

// %.17g: enough digits to round-trip any double exactly.
std::string format_double(double v);

std::optional<double> parse_double(const std::string& s);

std::vector<std::string> split(const std::string& line, char sep);

// FNV-1a 64-bit. Doubles are fed as little-endian bit patterns so the digest
// is platform independent.
class Digest {
public:
    void update_bytes(const void* data, std::size_t len);
    void update_u64(std::uint64_t v);
    void update_double(double v);
    void update_string(const std::string& s);
    std::uint64_t value() const { return state_; }
    static std::string hex(std::uint64_t v);

private:
    std::uint64_t state_ = 0xCBF29CE484222325ULL;
};

// Reads a whole file; throws io_error when unreadable.
std::string read_file(const std::string& path);

// Writes atomically enough for our purposes: to a temp sibling, then rename.
void write_file(const std::string& path, const std::string& contents);

} // namespace stepsvm
