#pragma once

#include <exception>
#include <mutex>

#include <omp.h>

namespace shredmap::detail {

// Captures the first exception thrown inside an OpenMP region so it can be
// rethrown on the calling thread.
class FirstError {
public:
    template <typename F>
    void run(F&& f) noexcept {
        try {
            f();
        } catch (...) {
            std::lock_guard lock(mutex_);
            if (!error_) error_ = std::current_exception();
        }
    }

    void rethrow() const {
        if (error_) std::rethrow_exception(error_);
    }

private:
    std::mutex mutex_;
    std::exception_ptr error_;
};

inline int resolve_workers(int requested) {
    return requested > 0 ? requested : omp_get_max_threads();
}

}  // namespace shredmap::detail
