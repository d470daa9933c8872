#pragma once

#include <fftw3.h>

#include <complex>
#include <map>
#include <mutex>
#include <utility>
#include <vector>

namespace pswb {

/// Cached FFTW plans, reused through the new-array execute interface.
class FftPlans {
public:
    static FftPlans& instance()
    {
        static FftPlans p;
        return p;
    }

    /// Unnormalized in-place transform over a row-major array of the given shape.
    /// sign = -1 computes sum f e^{-2 pi i jk/N}, sign = +1 the inverse kernel.
    void run(std::complex<double>* data, const std::vector<int>& shape, int sign)
    {
        fftw_plan p = plan(shape, sign);
        auto* d = reinterpret_cast<fftw_complex*>(data);
        fftw_execute_dft(p, d, d);
    }

    FftPlans(const FftPlans&) = delete;
    FftPlans& operator=(const FftPlans&) = delete;

private:
    FftPlans() = default;
    ~FftPlans()
    {
        for (auto& kv : plans_) fftw_destroy_plan(kv.second);
    }

    fftw_plan plan(const std::vector<int>& shape, int sign)
    {
        std::lock_guard<std::mutex> lock(mu_);
        auto key = std::make_pair(shape, sign);
        auto it = plans_.find(key);
        if (it != plans_.end()) return it->second;
        size_t total = 1;
        for (int s : shape) total *= static_cast<size_t>(s);
        auto* buf = fftw_alloc_complex(total);
        fftw_plan p = fftw_plan_dft(static_cast<int>(shape.size()), shape.data(), buf, buf,
                                    sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD,
                                    FFTW_ESTIMATE | FFTW_UNALIGNED);
        fftw_free(buf);
        plans_.emplace(key, p);
        return p;
    }

    std::mutex mu_;
    std::map<std::pair<std::vector<int>, int>, fftw_plan> plans_;
};

inline void fft(std::complex<double>* data, int n, int sign)
{
    FftPlans::instance().run(data, {n}, sign);
}

inline void fft(std::vector<std::complex<double>>& v, int sign)
{
    fft(v.data(), static_cast<int>(v.size()), sign);
}

inline void fft_nd(std::complex<double>* data, const std::vector<int>& shape, int sign)
{
    FftPlans::instance().run(data, shape, sign);
}

} // namespace pswb
