#pragma once

#include <stdexcept>
#include <string>

namespace accdict {

enum class errc {
    invalid_modulus,
    undefined_gcd,
    generation_failure,
    domain_error,
    no_preimage,
    representative_failure,
    key_mismatch,
    not_a_member,
    duplicate,
    empty_tree,
    unset_exponent,
    invalid_parameter,
    invalid_params,
    not_initialized,
    sentinel_digest,
    parse_error,
    io_error,
};

const char* to_string(errc code);

class error : public std::runtime_error {
public:
    error(errc code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    errc code() const noexcept { return code_; }

private:
    errc code_;
};

}  // namespace accdict
