// state_io.hpp: portable binary dump of states and dense operators.
//
// Layout (all integers and doubles little-endian):
//   char[4]  "QRS1"
//   uint32   n_c
//   uint64   dim (= 16 n_c^4)
//   char[24] basis-order tag, NUL padded ("cavity-major/spin-minor")
//   payload  complex doubles as (re, im) pairs; dim values for a state,
//            dim*dim values row-major for an operator

#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "qrs/errors.hpp"
#include "qrs/fock.hpp"

namespace qrs {

inline constexpr std::array<char, 4> kDumpMagic{'Q', 'R', 'S', '1'};
inline constexpr std::size_t kDumpTagBytes = 24;

namespace detail {

template <class T>
void put_le(std::ostream& os, T value) {
    using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
    U bits = std::bit_cast<U>(value);
    for (std::size_t i = 0; i < sizeof(U); ++i) {
        os.put(static_cast<char>(bits & 0xFF));
        bits >>= 8;
    }
}

template <class T>
T get_le(std::istream& is) {
    using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
    U bits = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) {
        const int c = is.get();
        if (c == std::char_traits<char>::eof()) throw Error(ErrorKind::DomainError, "truncated dump");
        bits |= static_cast<U>(static_cast<unsigned char>(c)) << (8 * i);
    }
    return std::bit_cast<T>(bits);
}

inline void write_header(std::ostream& os, const FockSpace& f) {
    os.write(kDumpMagic.data(), kDumpMagic.size());
    put_le<std::uint32_t>(os, static_cast<std::uint32_t>(f.n_c()));
    put_le<std::uint64_t>(os, static_cast<std::uint64_t>(f.dim()));
    std::array<char, kDumpTagBytes> tag{};
    std::memcpy(tag.data(), kBasisOrderTag, std::strlen(kBasisOrderTag));
    os.write(tag.data(), tag.size());
}

inline void put_complex(std::ostream& os, cplx z) {
    put_le<double>(os, z.real());
    put_le<double>(os, z.imag());
}

}  // namespace detail

inline void write_state(std::ostream& os, const FockSpace& f, const Vector& psi) {
    if (psi.size() != f.dim()) throw Error(ErrorKind::InvalidParameters, "state length does not match the space");
    detail::write_header(os, f);
    for (Eigen::Index i = 0; i < psi.size(); ++i) detail::put_complex(os, psi(i));
}

inline void write_operator(std::ostream& os, const FockSpace& f, const OperatorMatrix& m) {
    if (m.dim() != f.dim()) throw Error(ErrorKind::InvalidParameters, "operator size does not match the space");
    detail::write_header(os, f);
    const DenseMatrix d = m.to_dense();
    for (Eigen::Index r = 0; r < d.rows(); ++r)
        for (Eigen::Index c = 0; c < d.cols(); ++c) detail::put_complex(os, d(r, c));
}

struct Dump {
    int n_c{};
    std::uint64_t dim{};
    std::string basis_tag;
    bool is_operator{false};
    DenseMatrix data;  // dim x 1 for a state, dim x dim for an operator
};

inline Dump read_dump(std::istream& is) {
    std::array<char, 4> magic{};
    is.read(magic.data(), magic.size());
    if (!is || magic != kDumpMagic) throw Error(ErrorKind::DomainError, "not a QRS1 dump");
    Dump d;
    d.n_c = static_cast<int>(detail::get_le<std::uint32_t>(is));
    d.dim = detail::get_le<std::uint64_t>(is);
    std::array<char, kDumpTagBytes> tag{};
    is.read(tag.data(), tag.size());
    if (!is) throw Error(ErrorKind::DomainError, "truncated dump header");
    d.basis_tag.assign(tag.data(), strnlen(tag.data(), tag.size()));
    const FockSpace f(d.n_c);
    if (static_cast<std::uint64_t>(f.dim()) != d.dim) throw Error(ErrorKind::DomainError, "dump dimension mismatch");

    std::vector<cplx> values;
    values.reserve(d.dim);
    while (is.peek() != std::char_traits<char>::eof()) {
        const double re = detail::get_le<double>(is);
        const double im = detail::get_le<double>(is);
        values.emplace_back(re, im);
    }
    const auto n = static_cast<Eigen::Index>(d.dim);
    if (values.size() == d.dim) {
        d.data = Eigen::Map<DenseMatrix>(values.data(), n, 1);
    } else if (values.size() == d.dim * d.dim) {
        d.is_operator = true;
        d.data.resize(n, n);
        for (Eigen::Index r = 0; r < n; ++r)
            for (Eigen::Index c = 0; c < n; ++c) d.data(r, c) = values[static_cast<std::size_t>(r * n + c)];
    } else {
        throw Error(ErrorKind::DomainError, "dump payload has " + std::to_string(values.size()) + " values");
    }
    return d;
}

inline void save_state(const std::string& path, const FockSpace& f, const Vector& psi) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error(ErrorKind::InvalidParameters, "cannot open " + path);
    write_state(os, f, psi);
}

inline Dump load_dump(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error(ErrorKind::InvalidParameters, "cannot open " + path);
    return read_dump(is);
}

}  // namespace qrs
