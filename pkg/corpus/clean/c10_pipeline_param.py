def prepare(ds):
    return ds.map(parse).batch(32)
