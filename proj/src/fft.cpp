#include "halfwave/fft.hpp"

#include <fftw3.h>

#include <cstring>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

namespace halfwave::fft {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct Buffer {
  void* ptr = nullptr;
  explicit Buffer(std::size_t bytes) : ptr(fftw_malloc(bytes)) {
    if (!ptr) throw std::bad_alloc();
  }
  ~Buffer() { fftw_free(ptr); }
  Buffer(const Buffer&) = delete;
  Buffer& operator=(const Buffer&) = delete;
};

// Complex plans run on caller storage through the new-array interface, so
// they are made with FFTW_UNALIGNED; the buffers only serve planning and
// the real transforms.
struct Plans {
  int n;
  Buffer cbuf;   // n*n complex
  Buffer cbuf2;  // n*n complex
  Buffer rbuf;   // n*n real
  Buffer hbuf;   // n*(n/2+1) complex
  fftw_plan fwd = nullptr, bwd = nullptr, fwd_ip = nullptr, bwd_ip = nullptr;
  fftw_plan rfwd = nullptr, rbwd = nullptr;

  explicit Plans(int n_)
      : n(n_),
        cbuf(sizeof(fftw_complex) * n_ * n_),
        cbuf2(sizeof(fftw_complex) * n_ * n_),
        rbuf(sizeof(double) * n_ * n_),
        hbuf(sizeof(fftw_complex) * n_ * half_cols(n_)) {
    std::lock_guard<std::mutex> lock(planner_mutex());
    auto* c = static_cast<fftw_complex*>(cbuf.ptr);
    auto* c2 = static_cast<fftw_complex*>(cbuf2.ptr);
    auto* r = static_cast<double*>(rbuf.ptr);
    auto* h = static_cast<fftw_complex*>(hbuf.ptr);
    const unsigned f = FFTW_ESTIMATE | FFTW_UNALIGNED;
    fwd = fftw_plan_dft_2d(n, n, c, c2, FFTW_FORWARD, f);
    bwd = fftw_plan_dft_2d(n, n, c, c2, FFTW_BACKWARD, f);
    fwd_ip = fftw_plan_dft_2d(n, n, c, c, FFTW_FORWARD, f);
    bwd_ip = fftw_plan_dft_2d(n, n, c, c, FFTW_BACKWARD, f);
    rfwd = fftw_plan_dft_r2c_2d(n, n, r, h, FFTW_ESTIMATE);
    rbwd = fftw_plan_dft_c2r_2d(n, n, h, r, FFTW_ESTIMATE);
    if (!fwd || !bwd || !fwd_ip || !bwd_ip || !rfwd || !rbwd) {
      throw std::runtime_error("fftw planning failed");
    }
  }
  ~Plans() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    for (fftw_plan p : {fwd, bwd, fwd_ip, bwd_ip, rfwd, rbwd}) fftw_destroy_plan(p);
  }
};

fftw_complex* raw(const cplx* p) {
  return reinterpret_cast<fftw_complex*>(const_cast<cplx*>(p));
}

void execute(const Plans& p, bool inverse, const cplx* in, cplx* out) {
  if (in == out) {
    fftw_execute_dft(inverse ? p.bwd_ip : p.fwd_ip, raw(in), raw(out));
  } else {
    // Out-of-place complex plans leave the input intact.
    fftw_execute_dft(inverse ? p.bwd : p.fwd, raw(in), raw(out));
  }
}

Plans& plans_for(int n) {
  thread_local std::map<int, std::unique_ptr<Plans>> cache;
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, std::make_unique<Plans>(n)).first;
  return *it->second;
}

struct Plan1D {
  int n;
  Buffer buf;
  fftw_plan fwd = nullptr, bwd = nullptr;

  explicit Plan1D(int n_) : n(n_), buf(sizeof(fftw_complex) * n_) {
    std::lock_guard<std::mutex> lock(planner_mutex());
    auto* c = static_cast<fftw_complex*>(buf.ptr);
    fwd = fftw_plan_dft_1d(n, c, c, FFTW_FORWARD, FFTW_ESTIMATE);
    bwd = fftw_plan_dft_1d(n, c, c, FFTW_BACKWARD, FFTW_ESTIMATE);
    if (!fwd || !bwd) throw std::runtime_error("fftw planning failed");
  }
  ~Plan1D() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(bwd);
  }
};

Plan1D& plan1d_for(int n) {
  thread_local std::map<int, std::unique_ptr<Plan1D>> cache;
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, std::make_unique<Plan1D>(n)).first;
  return *it->second;
}

void check(std::size_t got, std::size_t want, const char* what) {
  if (got != want) throw std::invalid_argument(std::string("fft: bad size for ") + what);
}

}  // namespace

void forward(std::span<const cplx> in, std::span<cplx> out, int n) {
  const std::size_t sz = static_cast<std::size_t>(n) * n;
  check(in.size(), sz, "forward input");
  check(out.size(), sz, "forward output");
  execute(plans_for(n), false, in.data(), out.data());
}

void backward(std::span<const cplx> in, std::span<cplx> out, int n) {
  const std::size_t sz = static_cast<std::size_t>(n) * n;
  check(in.size(), sz, "backward input");
  check(out.size(), sz, "backward output");
  execute(plans_for(n), true, in.data(), out.data());
  const double scale = 1.0 / static_cast<double>(sz);
  for (std::size_t k = 0; k < sz; ++k) out[k] *= scale;
}

void forward_inplace(std::span<cplx> data, int n) {
  check(data.size(), static_cast<std::size_t>(n) * n, "forward_inplace");
  execute(plans_for(n), false, data.data(), data.data());
}

void backward_inplace(std::span<cplx> data, int n, bool normalize) {
  const std::size_t sz = static_cast<std::size_t>(n) * n;
  check(data.size(), sz, "backward_inplace");
  execute(plans_for(n), true, data.data(), data.data());
  if (normalize) {
    const double scale = 1.0 / static_cast<double>(sz);
    for (cplx& v : data) v *= scale;
  }
}

void forward_real(std::span<const double> in, std::span<cplx> out, int n) {
  const std::size_t sz = static_cast<std::size_t>(n) * n;
  const std::size_t hs = static_cast<std::size_t>(n) * half_cols(n);
  check(in.size(), sz, "forward_real input");
  check(out.size(), hs, "forward_real output");
  Plans& p = plans_for(n);
  std::memcpy(p.rbuf.ptr, in.data(), sz * sizeof(double));
  fftw_execute(p.rfwd);
  std::memcpy(out.data(), p.hbuf.ptr, hs * sizeof(cplx));
}

void backward_real(std::span<const cplx> in, std::span<double> out, int n) {
  const std::size_t sz = static_cast<std::size_t>(n) * n;
  const std::size_t hs = static_cast<std::size_t>(n) * half_cols(n);
  check(in.size(), hs, "backward_real input");
  check(out.size(), sz, "backward_real output");
  Plans& p = plans_for(n);
  std::memcpy(p.hbuf.ptr, in.data(), hs * sizeof(cplx));
  fftw_execute(p.rbwd);
  const double scale = 1.0 / static_cast<double>(sz);
  const auto* r = static_cast<const double*>(p.rbuf.ptr);
  for (std::size_t k = 0; k < sz; ++k) out[k] = r[k] * scale;
}

void transform_1d(std::span<cplx> data, bool inverse) {
  const int n = static_cast<int>(data.size());
  Plan1D& p = plan1d_for(n);
  std::memcpy(p.buf.ptr, data.data(), data.size() * sizeof(cplx));
  fftw_execute(inverse ? p.bwd : p.fwd);
  std::memcpy(data.data(), p.buf.ptr, data.size() * sizeof(cplx));
}

}  // namespace halfwave::fft
