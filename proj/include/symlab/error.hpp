#pragma once

#include <stdexcept>
#include <string>

namespace symlab {

/// Base class for every error raised by the library. The CLI maps these to
/// exit code 1; `config_error` maps to exit code 2.
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class config_error : public error {
public:
    using error::error;
};

class singular_matrix : public error {
public:
    singular_matrix() : error("singular matrix: linear image requires det != 0") {}
};

class tail_not_preserved : public error {
public:
    using error::error;
};

class left_phase_space : public error {
public:
    using error::error;
};

class unsupported_combination : public error {
public:
    using error::error;
};

class degenerate_set : public error {
public:
    using error::error;
};

class unsupported_set : public error {
public:
    using error::error;
};

class hole_limit_exceeded : public error {
public:
    using error::error;
};

class space_mismatch : public error {
public:
    using error::error;
};

class not_orthogonal : public error {
public:
    using error::error;
};

class not_disjoint : public error {
public:
    using error::error;
};

} // namespace symlab
