// Apache License, Version 2.0, refer to LICENSE.txt

#ifndef FAIRDIV_HASHING_HPP
#define FAIRDIV_HASHING_HPP

#include <string>
#include <string_view>

namespace fairdiv {

// SHA-1 digest as lowercase hex.
std::string sha1_hex(std::string_view data);

// Hash of the content framed like a git blob object:
// sha1("blob <size>\0<content>").
std::string git_blob_sha1(std::string_view content);

}  // namespace fairdiv

#endif  // FAIRDIV_HASHING_HPP
