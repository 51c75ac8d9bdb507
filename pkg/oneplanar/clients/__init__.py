from oneplanar.clients.graph_file_client import GraphFileClient

__all__ = ["GraphFileClient"]
