#pragma once

#include <algorithm>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "spt/config.hpp"
#include "spt/error.hpp"

namespace spt {

using buffer_id = std::uint32_t;

/// A flat element buffer. Buffers created for run-time allocation start out
/// unbacked and are materialised (zero filled) by an alloc task.
class StorageBase {
 public:
  StorageBase(buffer_id id, std::string name, index_t size)
      : id_(id), name_(std::move(name)), size_(size) {}
  virtual ~StorageBase() = default;

  StorageBase(const StorageBase&) = delete;
  StorageBase& operator=(const StorageBase&) = delete;

  buffer_id id() const { return id_; }
  const std::string& name() const { return name_; }
  index_t size() const { return size_; }

  virtual bool allocated() const = 0;
  virtual void allocate() = 0;  // zero filled
  virtual void release() = 0;
  virtual void zero() = 0;

 private:
  buffer_id id_;
  std::string name_;
  index_t size_;
};

template <class T>
class Storage final : public StorageBase {
 public:
  Storage(buffer_id id, std::string name, index_t size, bool backed)
      : StorageBase(id, std::move(name), size) {
    if (backed) allocate();
  }

  bool allocated() const override { return !data_.empty() || size() == 0; }
  void allocate() override { data_.assign(static_cast<std::size_t>(size()), T{}); }
  void release() override {
    data_.clear();
    data_.shrink_to_fit();
  }
  void zero() override { std::fill(data_.begin(), data_.end(), T{}); }

  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }

 private:
  std::vector<T> data_;
};

/// Owns every buffer touched by a family of task trees and hands out
/// sequential buffer ids, so traces and race reports are reproducible.
class Workspace {
 public:
  Workspace() = default;
  Workspace(const Workspace&) = delete;
  Workspace& operator=(const Workspace&) = delete;

  template <class T>
  Storage<T>* create(index_t size, std::string name, bool backed = true) {
    if (size < 0) throw Error(Errc::invalid_argument, "negative buffer size");
    auto id = static_cast<buffer_id>(buffers_.size());
    auto owned = std::make_unique<Storage<T>>(id, std::move(name), size, backed);
    Storage<T>* raw = owned.get();
    buffers_.push_back(std::move(owned));
    return raw;
  }

  std::size_t buffer_count() const { return buffers_.size(); }

  /// Drops every buffer created after `count` buffers existed.
  void truncate(std::size_t count) {
    if (count < buffers_.size()) buffers_.resize(count);
  }
  /// Frees a buffer's elements; its id stays reserved.
  void release(buffer_id id) { buffers_.at(id)->release(); }
  const StorageBase& buffer(buffer_id id) const { return *buffers_.at(id); }

 private:
  std::vector<std::unique_ptr<StorageBase>> buffers_;
};

}  // namespace spt
