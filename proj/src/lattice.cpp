#include "gridfun/lattice.hpp"

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace gridfun {

LatticeDomain::LatticeDomain(int dim, const MultiIndex& extent)
    : dim_(dim), extent_(extent), sites_(1) {
  if (dim < 1 || dim > kMaxDim)
    throw InvalidParameterError("LatticeDomain: dim must be in {1,2,3}");
  for (int k = 0; k < dim; ++k) {
    if (extent[k] < 1)
      throw InvalidParameterError("LatticeDomain: extents must be positive");
    sites_ *= extent[k];
  }
  for (int k = dim; k < kMaxDim; ++k) extent_[k] = 1;
}

void LatticeDomain::require_supports(double radius) const {
  for (int k = 0; k < dim_; ++k) {
    if (extent_[k] < 4.0 * radius)
      throw InvalidParameterError(
          "LatticeDomain: extent " + std::to_string(extent_[k]) + " on axis " +
          std::to_string(k) + " is below 4 x support radius " +
          std::to_string(radius));
  }
}

LatticeFunction::LatticeFunction(const LatticeDomain& domain, int components)
    : domain_(domain), components_(components) {
  if (components < 1)
    throw InvalidParameterError("LatticeFunction: components must be >= 1");
  values_.assign(static_cast<std::size_t>(domain.sites()) * components, 0.0);
}

LatticeFunction LatticeFunction::build(
    const LatticeDomain& domain, int components,
    const std::function<void(const MultiIndex&, double*)>& f) {
  LatticeFunction u(domain, components);
  for (std::int64_t s = 0; s < domain.sites(); ++s) {
    f(domain.site(s), &u.values_[static_cast<std::size_t>(s) * components]);
  }
  u.require_finite();
  return u;
}

double LatticeFunction::site_norm(const MultiIndex& site) const {
  const std::int64_t base = domain_.flatten(site) * components_;
  double s = 0.0;
  for (int c = 0; c < components_; ++c) {
    const double v = values_[base + c];
    s += v * v;
  }
  return std::sqrt(s);
}

bool LatticeFunction::is_finite() const {
  for (double v : values_)
    if (!std::isfinite(v)) return false;
  return true;
}

void LatticeFunction::require_finite() const {
  if (!is_finite())
    throw InvalidParameterError("LatticeFunction: non-finite value");
}

void LatticeFunction::require_same_domain(const LatticeFunction& other) const {
  if (domain_ != other.domain_ || components_ != other.components_)
    throw InvalidParameterError(
        "LatticeFunction: operands live on different domains");
}

LatticeFunction LatticeFunction::operator+(const LatticeFunction& other) const {
  require_same_domain(other);
  LatticeFunction r = *this;
  for (std::size_t i = 0; i < values_.size(); ++i)
    r.values_[i] += other.values_[i];
  return r;
}

LatticeFunction LatticeFunction::operator-(const LatticeFunction& other) const {
  require_same_domain(other);
  LatticeFunction r = *this;
  for (std::size_t i = 0; i < values_.size(); ++i)
    r.values_[i] -= other.values_[i];
  return r;
}

LatticeFunction LatticeFunction::operator*(double scale) const {
  LatticeFunction r = *this;
  for (double& v : r.values_) v *= scale;
  return r;
}

DeformationField::DeformationField(const SmallMatrix& gradient,
                                   LatticeFunction displacement)
    : gradient_(gradient), displacement_(std::move(displacement)) {
  if (gradient.dim != displacement_.domain().dim() ||
      displacement_.components() != displacement_.domain().dim())
    throw InvalidParameterError(
        "DeformationField: displacement must map Z^d -> R^d");
}

DeformationField DeformationField::admissible(const SmallMatrix& gradient,
                                              LatticeFunction displacement) {
  if (gradient.det() <= 0.0)
    throw InvalidParameterError(
        "DeformationField: far-field gradient must have positive determinant");
  return DeformationField(gradient, std::move(displacement));
}

Point DeformationField::deformed(const MultiIndex& site) const {
  const MultiIndex c = displacement_.domain().canonical(site);
  Point y = gradient_.apply(to_point(c));
  for (int k = 0; k < gradient_.dim; ++k) y[k] += displacement_.value(c, k);
  return y;
}

double lp_norm(const LatticeFunction& u, double p) {
  if (!(p >= 1.0))
    throw InvalidParameterError("lp_norm: p must be in [1, inf]");
  const std::int64_t n = u.domain().sites();
  if (std::isinf(p)) {
    double m = 0.0;
    for (std::int64_t s = 0; s < n; ++s)
      m = std::max(m, u.site_norm(u.domain().site(s)));
    return m;
  }
  double acc = 0.0;
  for (std::int64_t s = 0; s < n; ++s)
    acc += std::pow(u.site_norm(u.domain().site(s)), p);
  return std::pow(acc, 1.0 / p);
}

LatticeFunction forward_difference(const LatticeFunction& u, int axis) {
  if (axis < 0 || axis >= u.domain().dim())
    throw InvalidParameterError("forward_difference: axis out of range");
  return LatticeFunction::build(
      u.domain(), u.components(),
      [&](const MultiIndex& site, double* out) {
        MultiIndex next = site;
        next[axis] += 1;
        for (int c = 0; c < u.components(); ++c)
          out[c] = u.value(next, c) - u.value(site, c);
      });
}

LatticeFunction affine_sample(const LatticeDomain& domain,
                              const SmallMatrix& a, const Point& b) {
  if (a.dim != domain.dim())
    throw InvalidParameterError("affine_sample: matrix dimension mismatch");
  return LatticeFunction::build(
      domain, domain.dim(), [&](const MultiIndex& site, double* out) {
        const Point y = a.apply(to_point(site));
        for (int k = 0; k < domain.dim(); ++k) out[k] = y[k] + b[k];
      });
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

namespace {
constexpr char kBinaryMagic[8] = {'G', 'F', 'L', 'A', 'T', '0', '0', '1'};

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}
}  // namespace

void save_csv(const LatticeFunction& u, std::ostream& out) {
  const LatticeDomain& d = u.domain();
  out << d.dim();
  for (int k = 0; k < d.dim(); ++k) out << ',' << d.extent(k);
  out << ',' << u.components() << '\n';
  for (std::int64_t s = 0; s < d.sites(); ++s) {
    const MultiIndex site = d.site(s);
    for (int c = 0; c < u.components(); ++c) {
      if (c) out << ',';
      out << format_double(u.value(site, c));
    }
    out << '\n';
  }
}

LatticeFunction load_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line))
    throw InvalidParameterError("load_csv: missing header");
  std::istringstream header(line);
  std::vector<long long> fields;
  std::string tok;
  while (std::getline(header, tok, ',')) fields.push_back(std::stoll(tok));
  if (fields.size() < 3)
    throw InvalidParameterError("load_csv: malformed header");
  const int dim = static_cast<int>(fields[0]);
  if (dim < 1 || dim > kMaxDim || fields.size() != std::size_t(dim) + 2)
    throw InvalidParameterError("load_csv: malformed header");
  MultiIndex extent{1, 1, 1};
  for (int k = 0; k < dim; ++k) extent[k] = static_cast<int>(fields[1 + k]);
  const int components = static_cast<int>(fields[dim + 1]);
  LatticeDomain domain(dim, extent);
  LatticeFunction u(domain, components);
  for (std::int64_t s = 0; s < domain.sites(); ++s) {
    if (!std::getline(in, line))
      throw InvalidParameterError("load_csv: truncated file");
    std::istringstream row(line);
    for (int c = 0; c < components; ++c) {
      if (!std::getline(row, tok, ','))
        throw InvalidParameterError("load_csv: short row");
      u.raw()[static_cast<std::size_t>(s) * components + c] = std::stod(tok);
    }
  }
  u.require_finite();
  return u;
}

void save_binary(const LatticeFunction& u, std::ostream& out) {
  out.write(kBinaryMagic, sizeof(kBinaryMagic));
  const std::int32_t dim = u.domain().dim();
  out.write(reinterpret_cast<const char*>(&dim), sizeof(dim));
  for (int k = 0; k < dim; ++k) {
    const std::int64_t n = u.domain().extent(k);
    out.write(reinterpret_cast<const char*>(&n), sizeof(n));
  }
  const std::int32_t m = u.components();
  out.write(reinterpret_cast<const char*>(&m), sizeof(m));
  out.write(reinterpret_cast<const char*>(u.raw().data()),
            static_cast<std::streamsize>(u.raw().size() * sizeof(double)));
}

LatticeFunction load_binary(std::istream& in) {
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kBinaryMagic, sizeof(magic)) != 0)
    throw InvalidParameterError("load_binary: bad magic");
  std::int32_t dim = 0;
  in.read(reinterpret_cast<char*>(&dim), sizeof(dim));
  if (!in || dim < 1 || dim > kMaxDim)
    throw InvalidParameterError("load_binary: bad dimension");
  MultiIndex extent{1, 1, 1};
  for (int k = 0; k < dim; ++k) {
    std::int64_t n = 0;
    in.read(reinterpret_cast<char*>(&n), sizeof(n));
    extent[k] = static_cast<int>(n);
  }
  std::int32_t m = 0;
  in.read(reinterpret_cast<char*>(&m), sizeof(m));
  LatticeDomain domain(dim, extent);
  LatticeFunction u(domain, m);
  in.read(reinterpret_cast<char*>(u.raw().data()),
          static_cast<std::streamsize>(u.raw().size() * sizeof(double)));
  if (!in) throw InvalidParameterError("load_binary: truncated file");
  u.require_finite();
  return u;
}

void save_csv_file(const LatticeFunction& u, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InvalidParameterError("cannot open " + path);
  save_csv(u, out);
}

LatticeFunction load_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidParameterError("cannot open " + path);
  return load_csv(in);
}

}  // namespace gridfun
