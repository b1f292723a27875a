#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "httplib.h"

#include <netdb.h>
#include <openssl/err.h>
#include <openssl/ssl.h>
#include <openssl/x509.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <fcntl.h>
#include <memory>

#include "phishdet/email/url.hpp"
#include "phishdet/error.hpp"
#include "phishdet/resolvers/live_resolver.hpp"

namespace phishdet {
namespace {

class Socket {
 public:
  explicit Socket(int fd) : fd_(fd) {}
  ~Socket() {
    if (fd_ >= 0) ::close(fd_);
  }
  Socket(const Socket&) = delete;
  Socket& operator=(const Socket&) = delete;
  int get() const { return fd_; }

 private:
  int fd_;
};

int connect_with_timeout(const std::string& host, int port, std::chrono::milliseconds timeout) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  if (::getaddrinfo(host.c_str(), std::to_string(port).c_str(), &hints, &res) != 0) {
    throw Error(Errc::ResolutionFailed, "cannot resolve " + host);
  }
  std::unique_ptr<addrinfo, decltype(&::freeaddrinfo)> guard(res, ::freeaddrinfo);
  for (addrinfo* ai = res; ai; ai = ai->ai_next) {
    const int fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
    if (fd < 0) continue;
    const int flags = ::fcntl(fd, F_GETFL, 0);
    ::fcntl(fd, F_SETFL, flags | O_NONBLOCK);
    int rc = ::connect(fd, ai->ai_addr, ai->ai_addrlen);
    if (rc != 0 && errno == EINPROGRESS) {
      pollfd pfd{fd, POLLOUT, 0};
      rc = ::poll(&pfd, 1, static_cast<int>(timeout.count())) == 1 ? 0 : -1;
      int err = 0;
      socklen_t len = sizeof(err);
      if (rc == 0 && (::getsockopt(fd, SOL_SOCKET, SO_ERROR, &err, &len) != 0 || err != 0)) rc = -1;
    }
    if (rc == 0) {
      ::fcntl(fd, F_SETFL, flags);
      timeval tv{static_cast<time_t>(timeout.count() / 1000), static_cast<suseconds_t>((timeout.count() % 1000) * 1000)};
      ::setsockopt(fd, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof(tv));
      ::setsockopt(fd, SOL_SOCKET, SO_SNDTIMEO, &tv, sizeof(tv));
      return fd;
    }
    ::close(fd);
  }
  throw Error(Errc::ResolutionFailed, "cannot connect to " + host);
}

std::string name_entry(X509_NAME* name) {
  for (int nid : {NID_organizationName, NID_commonName}) {
    const int idx = X509_NAME_get_index_by_NID(name, nid, -1);
    if (idx < 0) continue;
    const ASN1_STRING* data = X509_NAME_ENTRY_get_data(X509_NAME_get_entry(name, idx));
    unsigned char* utf8 = nullptr;
    const int len = ASN1_STRING_to_UTF8(&utf8, data);
    if (len < 0) continue;
    std::string out(reinterpret_cast<char*>(utf8), static_cast<std::size_t>(len));
    OPENSSL_free(utf8);
    return out;
  }
  return {};
}

class NetworkTransport final : public Transport {
 public:
  HttpResponse get(const std::string& url, std::chrono::milliseconds timeout) override {
    const auto parsed = parse_url(url);
    if (!parsed || parsed->scheme_kind() == Scheme::other) {
      throw Error(Errc::ResolutionFailed, "not an http(s) URL: " + url);
    }
    std::string origin = parsed->scheme + "://" + parsed->host;
    if (parsed->port) origin += ":" + std::to_string(*parsed->port);
    httplib::Client client(origin);
    client.set_follow_location(false);
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.enable_server_certificate_verification(false);
    const std::string path = parsed->tail.empty() ? "/" : parsed->tail.substr(0, parsed->tail.find('#'));
    auto res = client.Get(path);
    if (!res) throw Error(Errc::ResolutionFailed, url + ": " + httplib::to_string(res.error()));
    HttpResponse out;
    out.status = res->status;
    out.body = res->body;
    if (res->has_header("Location")) out.location = res->get_header_value("Location");
    return out;
  }

  CertificateInfo peer_certificate(const std::string& host, std::chrono::milliseconds timeout) override {
    std::unique_ptr<SSL_CTX, decltype(&SSL_CTX_free)> ctx(SSL_CTX_new(TLS_client_method()), SSL_CTX_free);
    if (!ctx) throw Error(Errc::ResolutionFailed, "TLS context");
    Socket sock(connect_with_timeout(host, 443, timeout));
    std::unique_ptr<SSL, decltype(&SSL_free)> ssl(SSL_new(ctx.get()), SSL_free);
    SSL_set_tlsext_host_name(ssl.get(), host.c_str());
    SSL_set_fd(ssl.get(), sock.get());
    if (SSL_connect(ssl.get()) != 1) throw Error(Errc::ResolutionFailed, "TLS handshake with " + host);
    std::unique_ptr<X509, decltype(&X509_free)> cert(SSL_get1_peer_certificate(ssl.get()), X509_free);
    CertificateInfo info;
    if (!cert) return info;
    info.present = true;
    const std::string issuer = name_entry(X509_get_issuer_name(cert.get()));
    if (!issuer.empty()) info.issuer_name = issuer;
    info.self_signed = X509_check_issued(cert.get(), cert.get()) == X509_V_OK;
    SSL_shutdown(ssl.get());
    return info;
  }
};

}  // namespace

std::shared_ptr<Transport> make_network_transport() { return std::make_shared<NetworkTransport>(); }

}  // namespace phishdet
