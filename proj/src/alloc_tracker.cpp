#include "szwalk/alloc_tracker.hpp"

#include <malloc.h>

#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <new>

// The linker rewrites every malloc/free/... reference in the objects of an
// opted-in binary to __wrap_*, and provides the original under __real_*.
// Counting uses malloc_usable_size so that free() can subtract without a
// size registry. Operator new/delete are replaced as well (and exported via
// --export-dynamic) so that allocations made on behalf of the C++ standard
// library also funnel through the wrapped malloc.

extern "C" {
void* __real_malloc(std::size_t size);
void __real_free(void* ptr);
void* __real_calloc(std::size_t count, std::size_t size);
void* __real_realloc(void* ptr, std::size_t size);
void* __real_aligned_alloc(std::size_t alignment, std::size_t size);
}

namespace {

std::atomic<long long> g_current{0};
std::atomic<long long> g_peak{0};
std::atomic<bool> g_active{false};

void add_bytes(long long delta) noexcept {
  const long long now = g_current.fetch_add(delta, std::memory_order_relaxed) +
                        delta;
  long long peak = g_peak.load(std::memory_order_relaxed);
  while (now > peak &&
         !g_peak.compare_exchange_weak(peak, now, std::memory_order_relaxed)) {
  }
}

void count_alloc(void* ptr) noexcept {
  if (!ptr) return;
  g_active.store(true, std::memory_order_relaxed);
  add_bytes(static_cast<long long>(malloc_usable_size(ptr)));
}

void count_free(void* ptr) noexcept {
  if (!ptr) return;
  add_bytes(-static_cast<long long>(malloc_usable_size(ptr)));
}

}  // namespace

extern "C" {

void* __wrap_malloc(std::size_t size) {
  void* ptr = __real_malloc(size);
  count_alloc(ptr);
  return ptr;
}

void __wrap_free(void* ptr) {
  count_free(ptr);
  __real_free(ptr);
}

void* __wrap_calloc(std::size_t count, std::size_t size) {
  void* ptr = __real_calloc(count, size);
  count_alloc(ptr);
  return ptr;
}

void* __wrap_realloc(void* ptr, std::size_t size) {
  count_free(ptr);
  void* next = __real_realloc(ptr, size);
  if (next) {
    count_alloc(next);
  } else if (ptr && size != 0) {
    count_alloc(ptr);  // failed grow: the old block is still live
  }
  return next;
}

void* __wrap_aligned_alloc(std::size_t alignment, std::size_t size) {
  void* ptr = __real_aligned_alloc(alignment, size);
  count_alloc(ptr);
  return ptr;
}

}  // extern "C"

void* operator new(std::size_t size) {
  void* ptr = malloc(size == 0 ? 1 : size);
  if (!ptr) throw std::bad_alloc();
  return ptr;
}

void* operator new[](std::size_t size) { return ::operator new(size); }

void* operator new(std::size_t size, const std::nothrow_t&) noexcept {
  return malloc(size == 0 ? 1 : size);
}

void* operator new[](std::size_t size, const std::nothrow_t&) noexcept {
  return malloc(size == 0 ? 1 : size);
}

void* operator new(std::size_t size, std::align_val_t alignment) {
  const auto align = static_cast<std::size_t>(alignment);
  const std::size_t padded = (size + align - 1) / align * align;
  void* ptr = aligned_alloc(align, padded == 0 ? align : padded);
  if (!ptr) throw std::bad_alloc();
  return ptr;
}

void* operator new[](std::size_t size, std::align_val_t alignment) {
  return ::operator new(size, alignment);
}

void operator delete(void* ptr) noexcept { free(ptr); }
void operator delete[](void* ptr) noexcept { free(ptr); }
void operator delete(void* ptr, std::size_t) noexcept { free(ptr); }
void operator delete[](void* ptr, std::size_t) noexcept { free(ptr); }
void operator delete(void* ptr, std::align_val_t) noexcept { free(ptr); }
void operator delete[](void* ptr, std::align_val_t) noexcept { free(ptr); }
void operator delete(void* ptr, std::size_t, std::align_val_t) noexcept {
  free(ptr);
}
void operator delete[](void* ptr, std::size_t, std::align_val_t) noexcept {
  free(ptr);
}
void operator delete(void* ptr, const std::nothrow_t&) noexcept { free(ptr); }
void operator delete[](void* ptr, const std::nothrow_t&) noexcept {
  free(ptr);
}

namespace szwalk::alloc_tracker {

long long current_bytes() noexcept {
  return g_current.load(std::memory_order_relaxed);
}

long long peak_bytes() noexcept {
  return g_peak.load(std::memory_order_relaxed);
}

void reset_peak() noexcept {
  g_peak.store(g_current.load(std::memory_order_relaxed),
               std::memory_order_relaxed);
}

bool active() noexcept { return g_active.load(std::memory_order_relaxed); }

}  // namespace szwalk::alloc_tracker
