from .icestore import IceStorageParams, IceStorageState, storage_geometry, storage_rhs

__all__ = ["IceStorageParams", "IceStorageState", "storage_geometry", "storage_rhs"]
