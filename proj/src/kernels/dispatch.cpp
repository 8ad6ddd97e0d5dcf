#include <atomic>
#include <cstdlib>
#include <string_view>

#include "wickpde/kernels.hpp"

namespace wickpde::kernels {

#if WICKPDE_HAVE_AVX2
const KernelTable& avx2_table_impl() noexcept;
#endif

const KernelTable* avx2_table() noexcept {
#if WICKPDE_HAVE_AVX2
    __builtin_cpu_init();
    if (__builtin_cpu_supports("avx2")) return &avx2_table_impl();
#endif
    return nullptr;
}

namespace {

const KernelTable* initial_choice() noexcept {
    const char* env = std::getenv("WICKPDE_KERNELS");
    if (env != nullptr && std::string_view(env) == "scalar") return &scalar_table();
    if (const auto* t = avx2_table()) return t;
    return &scalar_table();
}

std::atomic<const KernelTable*>& current() noexcept {
    static std::atomic<const KernelTable*> table{initial_choice()};
    return table;
}

}  // namespace

const KernelTable& active() noexcept { return *current().load(std::memory_order_acquire); }

bool select(std::string_view name) noexcept {
    if (name == "scalar") {
        current().store(&scalar_table(), std::memory_order_release);
        return true;
    }
    if (name == "avx2") {
        if (const auto* t = avx2_table()) {
            current().store(t, std::memory_order_release);
            return true;
        }
    }
    return false;
}

}  // namespace wickpde::kernels
