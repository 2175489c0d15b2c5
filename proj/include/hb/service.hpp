#pragma once
// HTTP browsing service over a DatasetStore.
//
//   GET  /datasets                              list of dataset records
//   POST /datasets                              {"input", "format"?, "config"?} -> record
//   GET  /datasets/{id}                         record (build status)
//   GET  /datasets/{id}/entry-points            entry points plus the other node
//   GET  /datasets/{id}/nodes/{node}            node detail
//   GET  /datasets/{id}/nodes/{node}/children   ?offset=&limit= (limit defaults to 100)
//   GET  /datasets/{id}/search?q=               matches with one cheapest path each
//   GET  /datasets/{id}/metrics                 graph metrics and component rows
//   POST /datasets/{id}/effort                  {"targets": [...]} -> effort report

#include "hb/store.hpp"

#include <memory>
#include <string>

namespace hb {

inline constexpr std::size_t kChildrenPageSize = 100;

class Service {
public:
    explicit Service(DatasetStore& store);
    ~Service();

    // Binds and serves on a background thread; returns the bound port
    // (pass 0 for an ephemeral one). Throws ResourceError when binding fails.
    int start(const std::string& host, int port);
    // Serves on the calling thread until stop().
    void run(const std::string& host, int port);
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace hb
