#pragma once

#include <string>

namespace mbc {

// lowercase hex SHA-256
std::string sha256_hex(const std::string& data);
std::string sha256_file(const std::string& path);

}  // namespace mbc
