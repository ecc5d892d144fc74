import tensorflow as tf

ds = tf.data.TFRecordDataset(paths)
ds = ds.map(parse, **map_options)  # expect: MOB001
ds = ds.batch(32)
