import tensorflow as tf


def base_dataset(paths):
    ds = tf.data.TFRecordDataset(paths)
    return ds.shuffle(500)


train = base_dataset(train_paths)
train = train.map(parse_train)  # expect: DPM001
